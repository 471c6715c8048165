#include <doctest.h>

#include "oracles.hpp"
#include "semilin/errors.hpp"
#include "semilin/geometry.hpp"

using namespace semilin;

TEST_CASE("rectangle area, centroid and signed distance")
{
    const ConvexPolygon r = ConvexPolygon::rectangle(0, 0, 2, 1);
    CHECK(r.area() == doctest::Approx(2.0));
    CHECK(r.centroid().x() == doctest::Approx(1.0));
    CHECK(r.centroid().y() == doctest::Approx(0.5));
    CHECK(r.insideDistance(Vec2(1.0, 0.5)) == doctest::Approx(0.5));
    CHECK(r.insideDistance(Vec2(3.0, 0.5)) == doctest::Approx(-1.0));
    CHECK(r.containsClosed(Vec2(2.0, 1.0)));
}

TEST_CASE("polygon constructor rejects clockwise and non-convex input")
{
    CHECK_THROWS_AS(ConvexPolygon({Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)}), GeometryError);
    CHECK_THROWS_AS(ConvexPolygon({Vec2(0, 0), Vec2(2, 0), Vec2(1, 0.2), Vec2(1, 2)}), GeometryError);
}

TEST_CASE("interior angles of a triangle sum to pi")
{
    const ConvexPolygon t({Vec2(0.3, 0.3), Vec2(0.7, 0.35), Vec2(0.45, 0.7)});
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += t.interiorAngle(i);
    CHECK(s == doctest::Approx(oracle::pi));
}

TEST_CASE("Hausdorff distance of a translated square equals the shift")
{
    const ConvexPolygon a = ConvexPolygon::rectangle(0, 0, 1, 1);
    const ConvexPolygon b = ConvexPolygon::rectangle(0.1, 0, 1.1, 1);
    CHECK(boundaryHausdorff(a, b) == doctest::Approx(0.1));
    CHECK(boundaryHausdorff(a, a) == doctest::Approx(0.0));
}

TEST_CASE("vertex corner bisects the interior angle")
{
    const ConvexPolygon t({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)});
    const TruncatedCorner c = vertexCorner(t, 0, 0.2);
    CHECK(c.halfAngle == doctest::Approx(oracle::pi / 4));
    CHECK(c.axis.x() == doctest::Approx(std::sqrt(0.5)));
    CHECK(c.contains(Vec2(0.1, 0.05)));
    CHECK_FALSE(c.contains(Vec2(0.3, 0.05)));
}

TEST_CASE("probe direction opposes the axis with margin cos(halfAngle)")
{
    const TruncatedCorner c = TruncatedCorner::sector(Vec2(0, 0), Vec2(0, 1), oracle::pi / 6, 1.0);
    const ProbeDirection d = chooseProbeDirection(c);
    CHECK(d.d.y() == doctest::Approx(-1.0));
    CHECK(d.zeta == doctest::Approx(std::cos(oracle::pi / 6)));
    CHECK(d.d.dot(d.dPerp) == doctest::Approx(0.0));
}

TEST_CASE("nest validation")
{
    NestedPartition ok{{ConvexPolygon::rectangle(0.2, 0.2, 0.8, 0.8), ConvexPolygon::rectangle(0.35, 0.35, 0.65, 0.65)}};
    const NestReport r = validateNest(ok);
    CHECK(r.pass);
    REQUIRE(r.clearances.size() == 1);
    CHECK(r.clearances[0] == doctest::Approx(0.15));

    NestedPartition bad{{ConvexPolygon::rectangle(0.2, 0.2, 0.8, 0.8), ConvexPolygon::rectangle(0.5, 0.5, 0.9, 0.7)}};
    CHECK_FALSE(validateNest(bad).pass);
}

TEST_CASE("circular cone membership")
{
    const TruncatedCorner c = TruncatedCorner::circularCone(Vec3::Zero(), Vec3::UnitZ(), oracle::pi / 6, 1.0);
    CHECK(c.contains(Vec3(0.1, 0.0, 0.5)));
    CHECK_FALSE(c.contains(Vec3(0.5, 0.0, 0.5)));
    CHECK_FALSE(c.contains(Vec3(0.0, 0.0, 1.5)));
}
