#include <doctest.h>

#include "oracles.hpp"
#include "semilin/errors.hpp"
#include "semilin/indicator.hpp"

using namespace semilin;

namespace {

const TruncatedCorner kCorner = TruncatedCorner::sector(Vec2(0, 0), Vec2(1, 0), oracle::pi / 4, 1.0);

}  // namespace

TEST_CASE("analytic fields have the advertised Laplacians")
{
    const AnalyticField w = planeWave(1.5, Vec2(1, 0.3));
    const Vec2 x(0.2, -0.1);
    CHECK(std::abs(w.laplacian(x) + 2.25 * w.value(x)) < 1e-14);
    const AnalyticField b = apexBump(Vec2(0, 0), cplx(2, -1), 1.0, 1.0);
    CHECK(std::abs(b.laplacian(Vec2(0, 0)) - cplx(2, -1)) < 1e-14);
    // Finite-difference Laplacian away from the apex.
    const double h = 1e-4;
    const Vec2 y(0.3, 0.1);
    const cplx fd = (b.value(y + Vec2(h, 0)) + b.value(y - Vec2(h, 0)) + b.value(y + Vec2(0, h)) +
                     b.value(y - Vec2(0, h)) - 4.0 * b.value(y)) / (h * h);
    CHECK(std::abs(fd - b.laplacian(y)) < 1e-5);
}

TEST_CASE("flank bump vanishes with its gradient on the flanks")
{
    const AnalyticField f = flankBump(kCorner, 1.0);
    const Vec2 onFlank = 0.5 * Vec2(std::cos(oracle::pi / 4), std::sin(oracle::pi / 4));
    CHECK(std::abs(f.value(onFlank)) < 1e-15);
    CHECK(f.gradient(onFlank).norm() < 1e-14);
}

TEST_CASE("Green identity closes for manufactured pairs")
{
    const AnalyticField v = planeWave(1.5, Vec2(1, 0.3));
    const AnalyticField u = combine(combine(v, apexBump(Vec2(0, 0), cplx(2, -1), 1.0, 1.0)), flankBump(kCorner, 0.5));
    for (double tau : {2.0, 20.0}) {
        const GreenTerms g = greenIdentityResidual(kCorner, u, v, CgoProbe::forCorner(kCorner, tau), 1e-10);
        CHECK(g.relativeResidual < 1e-8);
    }
}

TEST_CASE("full-boundary extraction converges to the apex Laplacian gap")
{
    const AnalyticField v = planeWave(1.5, Vec2(1, 0.3));
    const cplx c(2, -1);
    const AnalyticField u = combine(v, apexBump(Vec2(0, 0), c, 1.0, 0.5));
    ExtractionOptions o;
    o.mode = BoundaryMode::fullBoundary;
    const ExtractionResult r = extractApexValue(kCorner, u, v, oracle::logGrid(20, 400, 12), o);
    CHECK(std::abs(r.limit - c) / std::abs(c) < 0.02);
    CHECK(r.errorOrder == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("two-content gap has the sign f1 - f2 and flips when the pair is swapped")
{
    const AnalyticField v = planeWave(1.5, Vec2(1, 0.3));
    const cplx c(2, -1);
    // Delta u = -f1, Delta v = -f2, so f1 - f2 = -Delta(u - v) = -c at the apex.
    const AnalyticField u = combine(v, apexBump(Vec2(0, 0), c, 1.0, 1.0));
    ExtractionOptions o;
    o.mode = BoundaryMode::fullBoundary;
    const auto taus = oracle::logGrid(20, 400, 12);
    const ExtractionResult a = extractTwoContentGap(kCorner, u, v, taus, o);
    const ExtractionResult b = extractTwoContentGap(kCorner, v, u, taus, o);
    CHECK(std::abs(a.limit + c) / std::abs(c) < 0.02);
    CHECK(std::abs(a.limit + b.limit) < 1e-12 * std::abs(c));
}

TEST_CASE("lid-only extraction requires matched flank data")
{
    const AnalyticField v = planeWave(1.5, Vec2(1, 0.3));
    const AnalyticField u = combine(v, apexBump(Vec2(0, 0), 1.0, 1.0, 1.0));
    ExtractionOptions o;
    o.mode = BoundaryMode::lidOnly;
    CHECK_THROWS_AS(extractApexValue(kCorner, u, v, oracle::logGrid(20, 200, 6), o), FlankMismatchError);
    const AnalyticField matched = combine(v, flankBump(kCorner, 1.0));
    CHECK(flankMismatch(kCorner, matched, v) < 1e-12);
    CHECK_NOTHROW(extractApexValue(kCorner, matched, v, oracle::logGrid(20, 200, 6), o));
}
