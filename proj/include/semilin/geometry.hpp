#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace semilin {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

enum class CornerKind { sector, circularCone, polyhedralCone };

/// A truncated corner: the cone with apex `apex`, axis `axis` and half
/// opening angle `halfAngle`, intersected with the ball of radius `radius`.
/// Two-dimensional corners are embedded in the z = 0 plane. For polyhedral
/// cones `edges` holds the generating rays in cyclic order and
/// (axis, halfAngle) describe the circumscribed circular cone.
struct TruncatedCorner {
    int dim = 2;
    CornerKind kind = CornerKind::sector;
    Vec3 apex = Vec3::Zero();
    Vec3 axis = Vec3::UnitX();
    double halfAngle = kPi / 4;
    double radius = 1.0;
    std::vector<Vec3> edges;

    static TruncatedCorner sector(const Vec2& apex, const Vec2& axis, double halfAngle, double radius);
    static TruncatedCorner circularCone(const Vec3& apex, const Vec3& axis, double halfAngle, double radius);
    // Axis = normalized mean of the unit edges, halfAngle = widest edge.
    static TruncatedCorner polyhedralCone(const Vec3& apex, std::vector<Vec3> edges, double radius);

    /// Throws GeometryError when an invariant is violated.
    void validate() const;

    /// Closed-set membership of the truncated corner.
    bool contains(const Vec3& p) const;
    bool contains(const Vec2& p) const { return contains(Vec3(p.x(), p.y(), 0.0)); }

    /// Angular interval [thetaMin, thetaMax] of a 2D sector (polar angle about the apex).
    double thetaMin() const;
    double thetaMax() const;
};

/// Direction pair (d, d_perp) and margin zeta of a CGO probe for a corner:
/// d . xhat <= -zeta on every ray of the corner.
struct ProbeDirection {
    Vec3 d = -Vec3::UnitX();
    Vec3 dPerp = -Vec3::UnitY();
    double zeta = 0.0;
};

/// d = -axis, d_perp = +90 degree rotation of d (2D) or a fixed orthogonal
/// unit vector (3D), zeta = cos(halfAngle) - slack.
ProbeDirection chooseProbeDirection(const TruncatedCorner& corner, double slack = 0.0);

/// Strictly convex polygon, vertices counterclockwise.
class ConvexPolygon {
public:
    ConvexPolygon() = default;
    /// Validates convexity and orientation; throws GeometryError otherwise.
    explicit ConvexPolygon(std::vector<Vec2> vertices);

    static ConvexPolygon rectangle(double x0, double y0, double x1, double y1);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    const Vec2& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }

    double area() const;
    Vec2 centroid() const;
    /// Signed distance to the boundary, positive inside. Exact for convex polygons.
    double insideDistance(const Vec2& p) const;
    bool containsStrictly(const Vec2& p) const { return insideDistance(p) > 0.0; }
    bool containsClosed(const Vec2& p, double tol = 0.0) const { return insideDistance(p) >= -tol; }
    /// Interior angle at a vertex, in (0, pi).
    double interiorAngle(std::size_t i) const;
    /// Scale about the centroid.
    ConvexPolygon scaled(double factor) const;

private:
    std::vector<Vec2> vertices_;
};

/// Point-to-segment distance.
double segmentDistance(const Vec2& p, const Vec2& a, const Vec2& b);
/// Segment-to-segment distance (0 when they intersect).
double segmentSegmentDistance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);
/// Symmetric Hausdorff distance between two polygon boundaries, sampled at
/// vertices and projected onto edges (exact for convex polygons).
double boundaryHausdorff(const ConvexPolygon& a, const ConvexPolygon& b);

/// Convex polyhedron given by its vertices; facets are derived on construction.
class ConvexPolyhedron {
public:
    struct Facet {
        Vec3 normal;  // outward unit normal
        double offset;  // normal . x = offset on the facet plane
        std::vector<int> vertices;  // counterclockwise seen from outside
    };

    ConvexPolyhedron() = default;
    explicit ConvexPolyhedron(std::vector<Vec3> vertices);

    static ConvexPolyhedron box(const Vec3& lo, const Vec3& hi);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Facet>& facets() const { return facets_; }
    double volume() const;
    double insideDistance(const Vec3& p) const;
    /// Vertices joined to vertex i by an edge of the polyhedron.
    std::vector<int> adjacentVertices(int i) const;
    /// Exact point-to-facet-polygon distance.
    double facetDistance(const Vec3& p, const Facet& facet) const;

private:
    std::vector<Vec3> vertices_;
    std::vector<Facet> facets_;
};

/// Corner at a polygon vertex. Throws CornerRadiusError if the ball of radius
/// h reaches a non-adjacent edge; the error carries the maximal admissible h.
TruncatedCorner vertexCorner(const ConvexPolygon& poly, std::size_t vertexIndex, double h);
/// Polyhedral corner at a polyhedron vertex (edges towards adjacent vertices).
TruncatedCorner vertexCorner(const ConvexPolyhedron& poly, std::size_t vertexIndex, double h);
double maxCornerRadius(const ConvexPolygon& poly, std::size_t vertexIndex);
double maxCornerRadius(const ConvexPolyhedron& poly, std::size_t vertexIndex);

/// Sigma_1 = layers[0] contains Sigma_2 = layers[1] contains ...
struct NestedPartition {
    std::vector<ConvexPolygon> layers;
};

struct NestReport {
    bool pass = false;
    // clearances[l] = min distance from the boundary of layer l+1 to the
    // boundary of layer l; negative when a vertex lies outside.
    std::vector<double> clearances;
    std::vector<std::string> messages;
};

NestReport validateNest(const NestedPartition& partition);
NestReport validateNest(const std::vector<ConvexPolyhedron>& layers);

struct ConeSpike {
    Vec3 apex;
    Vec3 axis;  // points from the apex into the core
    double halfAngle;
};

/// Convex core with conic spikes. dim == 2 uses corePolygon and sectors,
/// dim == 3 uses corePolyhedron and circular cones.
struct CoronaShape {
    int dim = 2;
    ConvexPolygon corePolygon;
    ConvexPolyhedron corePolyhedron;
    std::vector<ConeSpike> spikes;
};

struct CoronaReport {
    bool apexesOutside = false;  // condition (a)
    bool spikesBounded = false;  // condition (a): every cone ray meets the core
    bool basesOnCore = false;    // condition (b), first part
    bool basesDisjoint = false;  // condition (b), second part
    bool pass = false;
    std::vector<std::string> messages;
};

/// The 3D check samples each spike's base on the core surface at
/// `samplesPerSpike` rays; the 2D check is exact.
CoronaReport validateCorona(const CoronaShape& shape, int samplesPerSpike = 4000);

}  // namespace semilin
