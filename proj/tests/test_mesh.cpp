#include <doctest.h>

#include <sstream>

#include "semilin/mesh.hpp"

using namespace semilin;

namespace {

double regionArea(const TriMesh& m, int region)
{
    double s = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t)
        if (m.regionTag[t] == region) s += m.triangleArea(t);
    return s;
}

}  // namespace

TEST_CASE("conforming mesh resolves the interface")
{
    const ConvexPolygon dom = ConvexPolygon::rectangle(0, 0, 1, 1);
    const ConvexPolygon tri({Vec2(0.3, 0.3), Vec2(0.7, 0.35), Vec2(0.45, 0.7)});
    const TriMesh m = triangulate(dom, {tri}, 0.05);
    REQUIRE_NOTHROW(m.validate());
    CHECK(regionArea(m, 0) + regionArea(m, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(regionArea(m, 1) == doctest::Approx(tri.area()).epsilon(1e-12));
    CHECK(m.maxCircumradius() <= 0.05 * (1 + 1e-9));
    for (const Vec2& v : tri.vertices()) CHECK(findNode(m, v, 1e-12) >= 0);
}

TEST_CASE("refinement halves the mesh size and keeps the regions")
{
    const ConvexPolygon dom = ConvexPolygon::rectangle(0, 0, 1, 1);
    const ConvexPolygon sq = ConvexPolygon::rectangle(0.25, 0.25, 0.75, 0.75);
    const TriMesh m = triangulate(dom, {sq}, 0.1);
    const TriMesh f = refine(m);
    REQUIRE_NOTHROW(f.validate());
    CHECK(f.triangles.size() == 4 * m.triangles.size());
    CHECK(f.maxEdgeLength() == doctest::Approx(0.5 * m.maxEdgeLength()));
    CHECK(regionArea(f, 1) == doctest::Approx(0.25));
}

TEST_CASE("clipped area of a triangle against a half-covering square")
{
    const std::array<Vec2, 3> tri{Vec2(0, 0), Vec2(2, 0), Vec2(0, 2)};
    // Unit square is entirely inside the triangle.
    CHECK(clippedArea(tri, ConvexPolygon::rectangle(0, 0, 1, 1)) == doctest::Approx(1.0));
    // Square [1,2]x[0,1]: the part below x + y = 2 is half of it.
    CHECK(clippedArea(tri, ConvexPolygon::rectangle(1, 0, 2, 1)) == doctest::Approx(0.5));
}

TEST_CASE("embedded nest fractions reproduce the polygon area")
{
    const TriMesh base = triangulate(ConvexPolygon::rectangle(0, 0, 1, 1), {}, 0.05);
    const ConvexPolygon tri({Vec2(0.3, 0.3), Vec2(0.7, 0.35), Vec2(0.45, 0.7)});
    const TriMesh m = embedNest(base, {tri});
    double s = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) s += m.triangleArea(t) * m.regionFraction[t][1];
    CHECK(s == doctest::Approx(tri.area()).epsilon(1e-10));
}

TEST_CASE("mesh text round trip")
{
    const TriMesh m = triangulate(ConvexPolygon::rectangle(0, 0, 1, 1), {}, 0.25);
    std::stringstream ss;
    writeMesh(ss, m);
    const TriMesh r = readMesh(ss);
    CHECK(r.nodes.size() == m.nodes.size());
    CHECK(r.triangles == m.triangles);
}
