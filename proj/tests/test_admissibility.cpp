#include <doctest.h>

#include "semilin/admissibility.hpp"

using namespace semilin;

namespace {

AdmissibilityConfig triangleConfig(std::vector<cplx> layer)
{
    AdmissibilityConfig c;
    c.domain = ConvexPolygon::rectangle(0, 0, 1, 1);
    c.layers = {ConvexPolygon({Vec2(0.3, 0.3), Vec2(0.7, 0.35), Vec2(0.45, 0.7)})};
    c.content.backgroundLambda = 4.0;
    c.content.layers = {std::move(layer)};
    return c;
}

BoundaryFunction wave(cplx amplitude, Vec2 d)
{
    d.normalize();
    return [amplitude, d](const Vec2& x) { return amplitude * std::exp(cplx(0, 2.0 * d.dot(x))); };
}

}  // namespace

TEST_CASE("assumption A holds for a generic inclusion")
{
    AdmissibilityConfig c = triangleConfig({-30.0, 2.0});
    c.measurements = {wave(1.0, Vec2(1, 1))};
    const AdmissibilityReport r = checkAssumption(AssumptionKind::A, c);
    CHECK(r.pass);
    CHECK(r.worstMargin > r.tolerance);
}

TEST_CASE("assumption A fails when the inclusion content equals the background")
{
    AdmissibilityConfig c = triangleConfig({4.0});
    c.measurements = {wave(1.0, Vec2(1, 1))};
    const AdmissibilityReport r = checkAssumption(AssumptionKind::A, c);
    CHECK_FALSE(r.pass);
    CHECK(r.note.find("neither") != std::string::npos);
}

TEST_CASE("assumption B fails for repeated measurements")
{
    AdmissibilityConfig c = triangleConfig({-30.0, 2.0});
    c.measurements = {wave(1.0, Vec2(1, 1)), wave(1.0, Vec2(1, 1))};
    CHECK_FALSE(checkAssumption(AssumptionKind::B, c).pass);
    c.measurements = {wave(1.0, Vec2(1, 1)), wave(0.5, Vec2(1, -1))};
    CHECK(checkAssumption(AssumptionKind::B, c).pass);
}

TEST_CASE("scaled content follows the eps powers")
{
    ContentModel base;
    base.backgroundLambda = 0.0;
    base.layers = {{3.0, 2.0}};
    PlaneWaveScaling s;
    s.k0 = 2.0;
    s.zeta0 = 0.5;
    s.layerZeta = {0.5};
    const ContentModel c = scaledContent(base, s, 0.01);
    CHECK(std::abs(c.backgroundLambda - cplx(4.0 * 0.01)) < 1e-15);
    CHECK(std::abs(c.layers[0][0] - cplx(3.0 * 0.1)) < 1e-15);
}

TEST_CASE("small-data remainder is o(eps)")
{
    SmallDataConfig c;
    c.domain = ConvexPolygon::rectangle(0, 0, 1, 1);
    c.layers = {ConvexPolygon({Vec2(0.3, 0.3), Vec2(0.7, 0.35), Vec2(0.45, 0.7)})};
    c.content.backgroundLambda = 1.0;
    c.content.layers = {{1.0, 2.0}};
    c.scaling.layerZeta = {0.5};
    c.slopeThreshold = 1.2;
    const ExpansionReport r = smallDataExpansion(c, {1e-1, 1e-2, 1e-3, 1e-4});
    CHECK(r.monotone);
    CHECK(r.slope > 1.2);
}
