#include <doctest.h>

#include "oracles.hpp"
#include "semilin/probes.hpp"

using namespace semilin;
using oracle::cplx;

namespace {

// Angle of the probe direction d: (d + i d_perp) . xhat = e^{i(phi - beta)}.
double betaOf(const CgoProbe& p) { return std::atan2(p.direction.d.y(), p.direction.d.x()); }

}  // namespace

TEST_CASE("probe exponent matches the rotation convention")
{
    const TruncatedCorner c = TruncatedCorner::sector(Vec2(0.1, 0.2), Vec2(0, 1), oracle::pi / 3, 1.0);
    const CgoProbe p = CgoProbe::forCorner(c, 5.0);
    const double beta = betaOf(p);
    const double phi = 1.9, r = 0.3;
    const Vec2 x = Vec2(0.1, 0.2) + r * Vec2(std::cos(phi), std::sin(phi));
    const cplx expected = std::exp(5.0 * r * std::exp(cplx(0, phi - beta)));
    CHECK(std::abs(p.value(x) - expected) < 1e-14);
}

TEST_CASE("sector integral matches the infinite-sector oracle")
{
    const double half = oracle::pi / 3;
    const TruncatedCorner c = TruncatedCorner::sector(Vec2(0, 0), Vec2(0, 1), half, 1.0);
    for (double tau : {60.0, 150.0}) {
        const CgoProbe p = CgoProbe::forCorner(c, tau);
        const cplx want = oracle::infiniteSector(tau, betaOf(p), oracle::pi / 2 - half, oracle::pi / 2 + half);
        const cplx quad = cornerIntegral(p, IntegralMethod::quadrature, 1e-12).value;
        const cplx closed = cornerIntegral(p, IntegralMethod::closedForm2D, 1e-12).value;
        CHECK(std::abs(quad - want) / std::abs(want) < 1e-9);
        CHECK(std::abs(closed - want) / std::abs(want) < 1e-9);
        CHECK(std::abs(infiniteSectorIntegral(p) - want) / std::abs(want) < 1e-12);
    }
}

TEST_CASE("truncated sector integral matches direct polar quadrature")
{
    const TruncatedCorner c = TruncatedCorner::sector(Vec2(0, 0), Vec2(1, 0), oracle::pi / 4, 0.5);
    const CgoProbe p = CgoProbe::forCorner(c, 4.0);
    const double beta = betaOf(p);
    const cplx want = oracle::gauss(
        [&](double phi) {
            return oracle::gauss([&](double r) { return std::exp(4.0 * r * std::exp(cplx(0, phi - beta))) * r; }, 0, 0.5, 20);
        },
        -oracle::pi / 4, oracle::pi / 4, 20);
    CHECK(std::abs(cornerIntegral(p).value - want) / std::abs(want) < 1e-10);
}

TEST_CASE("weighted integral decays with the Gamma-function law")
{
    const TruncatedCorner c = TruncatedCorner::sector(Vec2(0, 0), Vec2(1, 0), oracle::pi / 4, 1.0);
    const double alpha = 0.5, tau = 80.0;
    const CgoProbe p = CgoProbe::forCorner(c, tau);
    const double beta = betaOf(p);
    // int r^(1+alpha) e^{tau r mu} dr = Gamma(2+alpha) / (-tau mu)^(2+alpha).
    const cplx want = oracle::gauss(
        [&](double phi) {
            const cplx mu = std::exp(cplx(0, phi - beta));
            return std::tgamma(2 + alpha) * std::pow(-tau * mu, -(2 + alpha));
        },
        -oracle::pi / 4, oracle::pi / 4, 40);
    CHECK(std::abs(weightedCornerIntegral(p, alpha).value - want) / std::abs(want) < 1e-8);
}

TEST_CASE("circular cone integral matches the spherical oracle")
{
    const double half = oracle::pi / 6, tau = 60.0;
    const TruncatedCorner c = TruncatedCorner::circularCone(Vec3::Zero(), Vec3::UnitZ(), half, 1.0);
    const CgoProbe p = CgoProbe::forCorner(c, tau);
    const Vec3 d = p.direction.d, e = p.direction.dPerp;
    // int_0^inf r^2 e^{tau r m} dr = 2 / (-tau m)^3 with m = (d + i e) . omega.
    const cplx want = oracle::gauss(
        [&](double th) {
            return oracle::gauss(
                [&](double ph) {
                    const Vec3 w(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
                    const cplx m(d.dot(w), e.dot(w));
                    return 2.0 / std::pow(-tau * m, 3) * std::sin(th);
                },
                0, 2 * oracle::pi, 40);
        },
        0, half, 40);
    CHECK(std::abs(cornerIntegral(p, IntegralMethod::quadrature, 1e-10).value - want) / std::abs(want) < 1e-7);
}

TEST_CASE("lid L2 norm matches the arc integral and stays below its bound")
{
    const TruncatedCorner c = TruncatedCorner::sector(Vec2(0, 0), Vec2(1, 0), oracle::pi / 4, 1.0);
    const double tau = 30.0;
    const CgoProbe p = CgoProbe::forCorner(c, tau);
    const double beta = betaOf(p);
    const double want = std::sqrt(oracle::gauss(
                                      [&](double phi) { return cplx(std::exp(2 * tau * std::cos(phi - beta))); },
                                      -oracle::pi / 4, oracle::pi / 4, 40)
                                      .real());
    const LidNorms n = lidNormEstimates(p);
    CHECK(n.l2 == doctest::Approx(want).epsilon(1e-9));
    CHECK(n.l2 <= n.boundL2);
    CHECK(n.h1 <= n.boundH1);
    CHECK(n.dnu <= n.boundDnu);
}

TEST_CASE("angular measures")
{
    CHECK(angularMeasure(TruncatedCorner::sector(Vec2(0, 0), Vec2(1, 0), 0.3, 1)) == doctest::Approx(0.6));
    CHECK(angularMeasure(TruncatedCorner::circularCone(Vec3::Zero(), Vec3::UnitZ(), oracle::pi / 6, 1)) ==
          doctest::Approx(2 * oracle::pi * (1 - std::cos(oracle::pi / 6))));
    CHECK(exactLeadingConstant(TruncatedCorner::sector(Vec2(0, 0), Vec2(1, 0), 0.3, 1)) == doctest::Approx(std::sin(0.6)));
}
