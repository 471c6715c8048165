#include <doctest.h>

#include "semilin/errors.hpp"
#include "semilin/inverse.hpp"
#include "semilin/mesh.hpp"

using namespace semilin;

namespace {

const ConvexPolygon kDomain = ConvexPolygon::rectangle(0, 0, 1, 1);
const ConvexPolygon kTriangle({Vec2(0.3, 0.3), Vec2(0.7, 0.35), Vec2(0.45, 0.7)});

ContentModel content()
{
    ContentModel c;
    c.backgroundLambda = 4.0;
    c.layers = {{-30.0, 2.0}};
    return c;
}

cplx wave(const Vec2& x) { return std::exp(cplx(0, 2.0 * (x.x() + x.y()) / std::sqrt(2.0))); }

}  // namespace

TEST_CASE("Vandermonde recovery inverts the power sums")
{
    const std::vector<cplx> apex{cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.5, -0.3)};
    const std::vector<cplx> coef{cplx(-3, 1), 2.0, cplx(0, 0.5)};
    std::vector<cplx> g;
    for (cplx u : apex) g.push_back(coef[0] * u + coef[1] * u * u + coef[2] * u * u * u);
    const std::vector<cplx> lib = forwardVandermonde(apex, coef);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(lib[i] - g[i]) < 1e-15);
    const VandermondeSolution s = recoverCoefficients(apex, g);
    for (std::size_t i = 0; i < coef.size(); ++i) CHECK(std::abs(s.coefficients[i] - coef[i]) < 1e-12);
}

TEST_CASE("Vandermonde recovery refuses coincident or zero apex values")
{
    CHECK_THROWS_AS(recoverCoefficients({0.3, 0.3}, {1.0, 2.0}), SingularSystemError);
    CHECK_THROWS_AS(recoverCoefficients({0.0, 0.3}, {1.0, 2.0}), SingularSystemError);
}

TEST_CASE("Cauchy gap is zero for identical data and positive for distinct inclusions")
{
    const CauchyData a = synthesizeCauchyData(kDomain, {kTriangle}, content(), wave, 0.05);
    const CauchyData b = synthesizeCauchyData(kDomain, {kTriangle}, content(), wave, 0.05);
    CHECK(cauchyGap(a, b) == 0.0);
    const CauchyData c = synthesizeCauchyData(kDomain, {kTriangle.scaled(1.1)}, content(), wave, 0.05);
    CHECK(cauchyGap(a, c) > 1e-3);
}

TEST_CASE("resampling onto the same boundary is the identity")
{
    const CauchyData a = synthesizeCauchyData(kDomain, {}, content(), wave, 0.05);
    const TriMesh m = triangulate(kDomain, {}, 0.05);
    const CauchyData r = resampleCauchyData(a, m);
    CHECK((r.dnu - a.dnu).norm() < 1e-13);
}

TEST_CASE("cut-cell misfit is small at the truth and grows away from it")
{
    RecoveryProblem p;
    p.domain = kDomain;
    p.hMesh = 0.05;
    p.measurements.push_back({"m1", wave, synthesizeCauchyData(kDomain, {kTriangle}, content(), wave, 0.025)});
    const CutCellSimulator sim(kDomain, 0.05);
    const double atTruth = sim.misfit(p, {kTriangle}, content());
    CHECK(atTruth < sim.misfit(p, {kTriangle.scaled(1.15)}, content()));
    CHECK(atTruth < sim.misfit(p, {kTriangle.scaled(0.85)}, content()));
}

TEST_CASE("convexity repair keeps a convex polygon and fixes a reflex vertex")
{
    const ConvexPolygon r = repairConvexity(kTriangle.vertices(), kDomain, 0.01);
    CHECK(boundaryHausdorff(r, kTriangle) < 1e-12);
    const std::vector<Vec2> dented{Vec2(0.2, 0.2), Vec2(0.8, 0.2), Vec2(0.5, 0.3), Vec2(0.8, 0.8), Vec2(0.2, 0.8)};
    const ConvexPolygon f = repairConvexity(dented, kDomain, 0.01);
    CHECK(f.size() == dented.size());
}

TEST_CASE("boundary coefficient fit recovers the inclusion polynomial")
{
    RecoveryProblem p;
    p.domain = kDomain;
    p.hMesh = 0.05;
    auto wave2 = [](const Vec2& x) { return 2.0 * std::exp(cplx(0, 2.0 * (x.x() - x.y()) / std::sqrt(2.0))); };
    p.measurements.push_back({"m1", wave, synthesizeCauchyData(kDomain, {kTriangle}, content(), wave, 0.05)});
    p.measurements.push_back({"m2", wave2, synthesizeCauchyData(kDomain, {kTriangle}, content(), wave2, 0.05)});
    ContentModel init = content();
    init.layers[0] = {-24.0, 1.6};
    // Same mesh for data and fit: the truth is an exact zero of the misfit.
    const CoefficientFit f = recoverCoefficientsFromBoundary(p, {kTriangle}, init, {{1, 1}, {1, 2}});
    CHECK(std::abs(f.coefficients[0] - cplx(-30.0)) < 1e-5);
    CHECK(std::abs(f.coefficients[1] - cplx(2.0)) < 1e-6);
    CHECK_FALSE(f.rankDeficient);
}

TEST_CASE("duplicate measurements flag the coefficient fit as rank deficient")
{
    RecoveryProblem p;
    p.domain = kDomain;
    p.hMesh = 0.05;
    const CauchyData d = synthesizeCauchyData(kDomain, {kTriangle}, content(), wave, 0.05);
    p.measurements = {{"m1", wave, d}, {"m2", wave, d}};
    ContentModel init = content();
    init.layers[0] = {-27.0, 1.8};
    const CoefficientFit f = recoverCoefficientsFromBoundary(p, {kTriangle}, init, {{1, 1}, {1, 2}});
    CHECK(f.rankDeficient);
}
