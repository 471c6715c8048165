#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "semilin/geometry.hpp"

namespace semilin {

struct BoundaryEdge {
    int a = 0, b = 0;  // counterclockwise along the outer boundary
    Vec2 normal = Vec2::Zero();  // outward unit normal
};

/// Conforming P1 triangulation. Region tags: 0 is the background, i+1 is the
/// innermost interface polygon i containing the triangle.
struct TriMesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise
    std::vector<int> regionTag;
    /// Optional per-triangle volume fractions of each region (summing to 1).
    /// When present they replace regionTag in assembly; see embedNest.
    std::vector<std::vector<double>> regionFraction;
    std::vector<BoundaryEdge> boundaryEdges;  // closed loop, starts at the lowest-leftmost node
    double meshSize = 0.0;

    double triangleArea(std::size_t t) const;
    double maxEdgeLength() const;
    double maxCircumradius() const;
    /// Boundary nodes in loop order.
    std::vector<int> boundaryNodes() const;
    /// Throws MeshError on negative or zero areas, non-manifold edges, or a
    /// boundary loop that does not match the free edges.
    void validate() const;
};

/// Conforming Delaunay mesh of `outer` with every interface edge resolved by
/// mesh edges and every circumradius at most hMesh. An axis-aligned
/// rectangle without interfaces gets a structured criss-cross mesh with
/// ceil(L/hMesh) cells per side. Throws MeshError when interfaces cross each
/// other or the outer boundary.
TriMesh triangulate(const ConvexPolygon& outer, const std::vector<ConvexPolygon>& interfaces, double hMesh);

/// Uniform refinement: every triangle split into four at edge midpoints.
/// Region tags are inherited; region fractions are dropped.
TriMesh refine(const TriMesh& mesh);

/// Area of the intersection of a triangle with a convex polygon.
double clippedArea(const std::array<Vec2, 3>& tri, const ConvexPolygon& poly);

/// Copy of `mesh` with exact cut-cell region fractions for a nest of convex
/// polygons ordered outermost first: region l is Sigma_l minus Sigma_(l+1).
/// regionTag becomes the region with the largest fraction. Throws
/// GeometryError when a polygon is not strictly inside its predecessor.
TriMesh embedNest(const TriMesh& mesh, const std::vector<ConvexPolygon>& nest);

/// Index of the node at p (within tol), or -1.
int findNode(const TriMesh& mesh, const Vec2& p, double tol = 1e-10);

struct PointLocation {
    int triangle = -1;
    std::array<double, 3> bary{};
};
/// Triangle containing p with barycentric coordinates; triangle = -1 outside.
PointLocation locatePoint(const TriMesh& mesh, const Vec2& p, double tol = 1e-12);

/// Plain-text format: "nodes N triangles T", N lines "x y", T lines
/// "i j k tag", "boundary B", B lines "i j nx ny", "meshsize h".
void writeMesh(std::ostream& os, const TriMesh& mesh);
TriMesh readMesh(std::istream& is);

}  // namespace semilin
