#include "semilin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "semilin/errors.hpp"

namespace semilin {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segmentDistance3(const Vec3& p, const Vec3& a, const Vec3& b)
{
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

// Unit vector orthogonal to u, chosen from the coordinate axis least aligned with u.
Vec3 anyOrthogonal(const Vec3& u)
{
    Vec3 e = Vec3::UnitX();
    if (std::abs(u.y()) < std::abs(u.x()) && std::abs(u.y()) <= std::abs(u.z())) e = Vec3::UnitY();
    else if (std::abs(u.z()) < std::abs(u.x()) && std::abs(u.z()) < std::abs(u.y())) e = Vec3::UnitZ();
    return u.cross(e).normalized();
}

// Parameter interval [tIn, tOut] of the ray apex + t*dir (t >= 0) inside a
// convex region given by half-spaces n.x <= c. Returns false when empty.
template <class V>
bool clipRay(const V& apex, const V& dir, const std::vector<std::pair<V, double>>& halfSpaces,
             double& tIn, double& tOut)
{
    tIn = 0.0;
    tOut = std::numeric_limits<double>::infinity();
    for (const auto& [n, c] : halfSpaces) {
        const double nd = n.dot(dir);
        const double slack = c - n.dot(apex);
        if (std::abs(nd) < 1e-15) {
            if (slack < 0) return false;
            continue;
        }
        const double t = slack / nd;
        if (nd > 0) tOut = std::min(tOut, t);
        else tIn = std::max(tIn, t);
    }
    return tIn <= tOut;
}

std::vector<std::pair<Vec2, double>> halfSpaces(const ConvexPolygon& poly)
{
    std::vector<std::pair<Vec2, double>> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly.vertex(i), b = poly.vertex(i + 1);
        const Vec2 e = (b - a).normalized();
        const Vec2 outward(e.y(), -e.x());
        out.emplace_back(outward, outward.dot(a));
    }
    return out;
}

std::vector<std::pair<Vec3, double>> halfSpaces(const ConvexPolyhedron& poly)
{
    std::vector<std::pair<Vec3, double>> out;
    for (const auto& f : poly.facets()) out.emplace_back(f.normal, f.offset);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// TruncatedCorner

TruncatedCorner TruncatedCorner::sector(const Vec2& apex, const Vec2& axis, double halfAngle, double radius)
{
    TruncatedCorner c;
    c.dim = 2;
    c.kind = CornerKind::sector;
    c.apex = Vec3(apex.x(), apex.y(), 0.0);
    const double n = axis.norm();
    if (!(n > 0)) throw GeometryError("sector axis must be nonzero");
    c.axis = Vec3(axis.x() / n, axis.y() / n, 0.0);
    c.halfAngle = halfAngle;
    c.radius = radius;
    c.validate();
    return c;
}

TruncatedCorner TruncatedCorner::circularCone(const Vec3& apex, const Vec3& axis, double halfAngle, double radius)
{
    TruncatedCorner c;
    c.dim = 3;
    c.kind = CornerKind::circularCone;
    c.apex = apex;
    if (!(axis.norm() > 0)) throw GeometryError("cone axis must be nonzero");
    c.axis = axis.normalized();
    c.halfAngle = halfAngle;
    c.radius = radius;
    c.validate();
    return c;
}

TruncatedCorner TruncatedCorner::polyhedralCone(const Vec3& apex, std::vector<Vec3> edges, double radius)
{
    if (edges.size() < 3) throw GeometryError("polyhedral cone needs at least 3 edges");
    TruncatedCorner c;
    c.dim = 3;
    c.kind = CornerKind::polyhedralCone;
    c.apex = apex;
    Vec3 mean = Vec3::Zero();
    for (auto& e : edges) {
        if (!(e.norm() > 0)) throw GeometryError("polyhedral cone edge must be nonzero");
        e.normalize();
        mean += e;
    }
    if (mean.norm() < 1e-12) throw GeometryError("polyhedral cone edges do not fit in a convex cone");
    c.axis = mean.normalized();
    double widest = 0.0;
    for (const auto& e : edges) widest = std::max(widest, std::acos(std::clamp(e.dot(c.axis), -1.0, 1.0)));
    c.halfAngle = widest;
    c.radius = radius;
    c.edges = std::move(edges);
    c.validate();
    return c;
}

void TruncatedCorner::validate() const
{
    if (dim != 2 && dim != 3) throw GeometryError("corner dimension must be 2 or 3");
    if (!(halfAngle > 0.0) || !(halfAngle < kPi / 2))
        throw GeometryError("corner half angle must lie in (0, pi/2): cone not strictly convex");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("corner radius must be positive");
    if (std::abs(axis.norm() - 1.0) > 1e-12) throw GeometryError("corner axis must be a unit vector");
    if (dim == 2 && (kind != CornerKind::sector || axis.z() != 0.0 || apex.z() != 0.0))
        throw GeometryError("2D corners must be sectors in the z = 0 plane");
    if (dim == 3 && kind == CornerKind::sector) throw GeometryError("sector corners are two-dimensional");
    if (kind == CornerKind::polyhedralCone) {
        if (edges.size() < 3) throw GeometryError("polyhedral cone needs at least 3 edges");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (std::acos(std::clamp(edges[i].dot(axis), -1.0, 1.0)) > halfAngle + 1e-12)
                throw GeometryError("polyhedral cone edge outside the circumscribed cone");
            for (std::size_t j = i + 1; j < edges.size(); ++j)
                if (edges[i].cross(edges[j]).norm() < 1e-12)
                    throw GeometryError("polyhedral cone edges are linearly dependent");
        }
    }
}

bool TruncatedCorner::contains(const Vec3& p) const
{
    const Vec3 x = p - apex;
    const double r = x.norm();
    const double tol = 1e-12 * std::max(1.0, radius);
    if (r > radius + tol) return false;
    if (r <= tol) return true;
    if (dim == 2 && std::abs(x.z()) > tol) return false;
    if (kind != CornerKind::polyhedralCone) return x.dot(axis) >= r * std::cos(halfAngle) - tol;
    const std::size_t m = edges.size();
    for (std::size_t i = 0; i < m; ++i) {
        Vec3 n = edges[i].cross(edges[(i + 1) % m]);
        if (n.dot(axis) < 0) n = -n;
        if (n.normalized().dot(x) < -tol) return false;
    }
    return true;
}

double TruncatedCorner::thetaMin() const { return std::atan2(axis.y(), axis.x()) - halfAngle; }
double TruncatedCorner::thetaMax() const { return std::atan2(axis.y(), axis.x()) + halfAngle; }

ProbeDirection chooseProbeDirection(const TruncatedCorner& corner, double slack)
{
    corner.validate();
    ProbeDirection pd;
    pd.d = -corner.axis;
    if (corner.dim == 2) pd.dPerp = Vec3(-pd.d.y(), pd.d.x(), 0.0);
    else pd.dPerp = anyOrthogonal(pd.d);
    pd.zeta = std::cos(corner.halfAngle) - slack;
    if (!(pd.zeta > 0.0)) throw GeometryError("probe margin is not positive: slack too large for this corner");
    return pd;
}

// ---------------------------------------------------------------------------
// ConvexPolygon

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices))
{
    const std::size_t n = vertices_.size();
    if (n < 3) throw GeometryError("polygon needs at least 3 vertices");
    for (const auto& v : vertices_)
        if (!v.allFinite()) throw GeometryError("polygon vertex is not finite");
    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = vertex(i + 1) - vertex(i);
        const Vec2 e1 = vertex(i + 2) - vertex(i + 1);
        if (e0.norm() == 0.0) throw GeometryError("polygon has repeated vertices");
        const double c = cross2(e0, e1);
        if (!(c > 1e-14 * e0.norm() * e1.norm()))
            throw GeometryError("polygon must be strictly convex and counterclockwise");
        turning += std::atan2(c, e0.dot(e1));
    }
    if (std::abs(turning - 2 * kPi) > 1e-9) throw GeometryError("polygon is not simple");
}

ConvexPolygon ConvexPolygon::rectangle(double x0, double y0, double x1, double y1)
{
    return ConvexPolygon({Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)});
}

double ConvexPolygon::area() const
{
    double a = 0.0;
    for (std::size_t i = 0; i < size(); ++i) a += cross2(vertex(i), vertex(i + 1));
    return 0.5 * a;
}

Vec2 ConvexPolygon::centroid() const
{
    Vec2 c = Vec2::Zero();
    double a = 0.0;
    const Vec2 o = vertex(0);
    for (std::size_t i = 1; i + 1 < size(); ++i) {
        const double t = 0.5 * cross2(vertex(i) - o, vertex(i + 1) - o);
        c += t * (o + vertex(i) + vertex(i + 1)) / 3.0;
        a += t;
    }
    return c / a;
}

double ConvexPolygon::insideDistance(const Vec2& p) const
{
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i) {
        const Vec2 a = vertex(i), b = vertex(i + 1);
        d = std::min(d, cross2(b - a, p - a) / (b - a).norm());
    }
    return d;
}

double ConvexPolygon::interiorAngle(std::size_t i) const
{
    const std::size_t n = size();
    const Vec2 v = vertex(i);
    const Vec2 a = vertex(i + n - 1) - v;
    const Vec2 b = vertex(i + 1) - v;
    return std::atan2(std::abs(cross2(a, b)), a.dot(b));
}

ConvexPolygon ConvexPolygon::scaled(double factor) const
{
    const Vec2 c = centroid();
    std::vector<Vec2> v;
    v.reserve(size());
    for (const auto& p : vertices_) v.push_back(c + factor * (p - c));
    return ConvexPolygon(std::move(v));
}

double segmentDistance(const Vec2& p, const Vec2& a, const Vec2& b)
{
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double segmentSegmentDistance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d)
{
    const double d1 = cross2(b - a, c - a), d2 = cross2(b - a, d - a);
    const double d3 = cross2(d - c, a - c), d4 = cross2(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return 0.0;
    return std::min({segmentDistance(a, c, d), segmentDistance(b, c, d), segmentDistance(c, a, b),
                     segmentDistance(d, a, b)});
}

double boundaryHausdorff(const ConvexPolygon& a, const ConvexPolygon& b)
{
    // Distance to a polygon boundary is not convex along an edge when the edge
    // crosses the other polygon, so edges are sampled densely.
    constexpr int kSamples = 256;
    auto directed = [](const ConvexPolygon& from, const ConvexPolygon& to) {
        double worst = 0.0;
        for (std::size_t i = 0; i < from.size(); ++i) {
            const Vec2 p0 = from.vertex(i), p1 = from.vertex(i + 1);
            for (int s = 0; s < kSamples; ++s) {
                const Vec2 p = p0 + (p1 - p0) * (double(s) / kSamples);
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < to.size(); ++j)
                    best = std::min(best, segmentDistance(p, to.vertex(j), to.vertex(j + 1)));
                worst = std::max(worst, best);
            }
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

// ---------------------------------------------------------------------------
// ConvexPolyhedron

ConvexPolyhedron::ConvexPolyhedron(std::vector<Vec3> vertices) : vertices_(std::move(vertices))
{
    const int n = static_cast<int>(vertices_.size());
    if (n < 4) throw GeometryError("polyhedron needs at least 4 vertices");
    double scale = 0.0;
    for (const auto& v : vertices_) {
        if (!v.allFinite()) throw GeometryError("polyhedron vertex is not finite");
        scale = std::max(scale, (v - vertices_[0]).norm());
    }
    const double tol = 1e-10 * scale;

    // Brute-force supporting planes through vertex triples.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                Vec3 nrm = (vertices_[j] - vertices_[i]).cross(vertices_[k] - vertices_[i]);
                if (nrm.norm() < 1e-12 * scale * scale) continue;
                nrm.normalize();
                double off = nrm.dot(vertices_[i]);
                int above = 0, below = 0;
                for (int m = 0; m < n; ++m) {
                    const double s = nrm.dot(vertices_[m]) - off;
                    if (s > tol) ++above;
                    else if (s < -tol) ++below;
                }
                if (above && below) continue;
                if (above) {
                    nrm = -nrm;
                    off = -off;
                }
                bool duplicate = false;
                for (const auto& f : facets_)
                    if ((f.normal - nrm).norm() < 1e-9) duplicate = true;
                if (duplicate) continue;
                Facet f{nrm, off, {}};
                for (int m = 0; m < n; ++m)
                    if (std::abs(nrm.dot(vertices_[m]) - off) <= tol) f.vertices.push_back(m);
                facets_.push_back(std::move(f));
            }

    std::vector<int> incidence(n, 0);
    for (auto& f : facets_) {
        Vec3 c = Vec3::Zero();
        for (int v : f.vertices) c += vertices_[v];
        c /= double(f.vertices.size());
        const Vec3 u = anyOrthogonal(f.normal);
        const Vec3 w = f.normal.cross(u);
        std::sort(f.vertices.begin(), f.vertices.end(), [&](int a, int b) {
            const Vec3 pa = vertices_[a] - c, pb = vertices_[b] - c;
            return std::atan2(pa.dot(w), pa.dot(u)) < std::atan2(pb.dot(w), pb.dot(u));
        });
        const std::size_t m = f.vertices.size();
        for (std::size_t q = 0; q < m; ++q) {
            const Vec3 a = vertices_[f.vertices[q]];
            const Vec3 b = vertices_[f.vertices[(q + 1) % m]];
            const Vec3 d = vertices_[f.vertices[(q + 2) % m]];
            if ((b - a).cross(d - b).dot(f.normal) <= 1e-12 * scale * scale)
                throw GeometryError("polyhedron is not strictly convex (vertex inside a facet)");
        }
        for (int v : f.vertices) ++incidence[v];
    }
    for (int v = 0; v < n; ++v)
        if (incidence[v] < 3) throw GeometryError("polyhedron is not strictly convex (interior vertex)");
    if (!(volume() > 0)) throw GeometryError("polyhedron is degenerate");
}

ConvexPolyhedron ConvexPolyhedron::box(const Vec3& lo, const Vec3& hi)
{
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i)
        v.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
    return ConvexPolyhedron(std::move(v));
}

double ConvexPolyhedron::volume() const
{
    double vol = 0.0;
    const Vec3 o = vertices_[0];
    for (const auto& f : facets_)
        for (std::size_t q = 1; q + 1 < f.vertices.size(); ++q)
            vol += (vertices_[f.vertices[0]] - o)
                       .dot((vertices_[f.vertices[q]] - o).cross(vertices_[f.vertices[q + 1]] - o));
    return vol / 6.0;
}

double ConvexPolyhedron::insideDistance(const Vec3& p) const
{
    double d = std::numeric_limits<double>::infinity();
    for (const auto& f : facets_) d = std::min(d, f.offset - f.normal.dot(p));
    return d;
}

std::vector<int> ConvexPolyhedron::adjacentVertices(int i) const
{
    std::vector<int> out;
    for (const auto& f : facets_) {
        const std::size_t m = f.vertices.size();
        for (std::size_t q = 0; q < m; ++q)
            if (f.vertices[q] == i) {
                out.push_back(f.vertices[(q + 1) % m]);
                out.push_back(f.vertices[(q + m - 1) % m]);
            }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double ConvexPolyhedron::facetDistance(const Vec3& p, const Facet& facet) const
{
    const double h = facet.normal.dot(p) - facet.offset;
    const Vec3 q = p - h * facet.normal;
    const std::size_t m = facet.vertices.size();
    bool inside = true;
    for (std::size_t k = 0; k < m; ++k) {
        const Vec3 a = vertices_[facet.vertices[k]], b = vertices_[facet.vertices[(k + 1) % m]];
        if ((b - a).cross(q - a).dot(facet.normal) < 0) inside = false;
    }
    if (inside) return std::abs(h);
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k)
        d = std::min(d, segmentDistance3(p, vertices_[facet.vertices[k]], vertices_[facet.vertices[(k + 1) % m]]));
    return d;
}

// ---------------------------------------------------------------------------
// Corners at vertices

double maxCornerRadius(const ConvexPolygon& poly, std::size_t vertexIndex)
{
    const std::size_t n = poly.size();
    if (vertexIndex >= n) throw GeometryError("vertex index out of range");
    const Vec2 v = poly.vertex(vertexIndex);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < n; ++e) {
        if (e == vertexIndex || (e + 1) % n == vertexIndex) continue;
        best = std::min(best, segmentDistance(v, poly.vertex(e), poly.vertex(e + 1)));
    }
    return best;
}

TruncatedCorner vertexCorner(const ConvexPolygon& poly, std::size_t vertexIndex, double h)
{
    const double maxH = maxCornerRadius(poly, vertexIndex);
    if (!(h > 0)) throw GeometryError("corner radius must be positive");
    if (h > maxH) {
        std::ostringstream msg;
        msg << "corner radius " << h << " reaches a non-adjacent edge; maximal admissible radius is " << maxH;
        throw CornerRadiusError(msg.str(), maxH);
    }
    const std::size_t n = poly.size();
    const Vec2 v = poly.vertex(vertexIndex);
    const Vec2 a = (poly.vertex(vertexIndex + n - 1) - v).normalized();
    const Vec2 b = (poly.vertex(vertexIndex + 1) - v).normalized();
    return TruncatedCorner::sector(v, a + b, 0.5 * poly.interiorAngle(vertexIndex), h);
}

double maxCornerRadius(const ConvexPolyhedron& poly, std::size_t vertexIndex)
{
    if (vertexIndex >= poly.vertices().size()) throw GeometryError("vertex index out of range");
    const int vi = static_cast<int>(vertexIndex);
    const Vec3 v = poly.vertices()[vertexIndex];
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : poly.facets()) {
        if (std::find(f.vertices.begin(), f.vertices.end(), vi) != f.vertices.end()) continue;
        best = std::min(best, poly.facetDistance(v, f));
    }
    return best;
}

TruncatedCorner vertexCorner(const ConvexPolyhedron& poly, std::size_t vertexIndex, double h)
{
    const double maxH = maxCornerRadius(poly, vertexIndex);
    if (!(h > 0)) throw GeometryError("corner radius must be positive");
    if (h > maxH) {
        std::ostringstream msg;
        msg << "corner radius " << h << " reaches a non-incident facet; maximal admissible radius is " << maxH;
        throw CornerRadiusError(msg.str(), maxH);
    }
    const Vec3 v = poly.vertices()[vertexIndex];
    std::vector<Vec3> edges;
    Vec3 mean = Vec3::Zero();
    for (int j : poly.adjacentVertices(static_cast<int>(vertexIndex))) {
        edges.push_back((poly.vertices()[j] - v).normalized());
        mean += edges.back();
    }
    // Cyclic order around the mean edge direction.
    const Vec3 ax = mean.normalized();
    const Vec3 u = anyOrthogonal(ax);
    const Vec3 w = ax.cross(u);
    std::sort(edges.begin(), edges.end(), [&](const Vec3& a, const Vec3& b) {
        return std::atan2(a.dot(w), a.dot(u)) < std::atan2(b.dot(w), b.dot(u));
    });
    return TruncatedCorner::polyhedralCone(v, std::move(edges), h);
}

// ---------------------------------------------------------------------------
// Nests

NestReport validateNest(const NestedPartition& partition)
{
    NestReport rep;
    if (partition.layers.empty()) {
        rep.messages.push_back("partition has no layers");
        return rep;
    }
    rep.pass = true;
    for (std::size_t l = 0; l + 1 < partition.layers.size(); ++l) {
        // Distance to the outer boundary is a minimum of affine functions
        // inside the outer polygon, so its minimum over the inner boundary
        // is attained at an inner vertex.
        double c = std::numeric_limits<double>::infinity();
        for (const auto& v : partition.layers[l + 1].vertices())
            c = std::min(c, partition.layers[l].insideDistance(v));
        rep.clearances.push_back(c);
        if (!(c > 0)) {
            rep.pass = false;
            std::ostringstream msg;
            msg << "layer " << l + 2 << " is not compactly contained in layer " << l + 1 << " (clearance " << c << ")";
            rep.messages.push_back(msg.str());
        }
    }
    return rep;
}

NestReport validateNest(const std::vector<ConvexPolyhedron>& layers)
{
    NestReport rep;
    if (layers.empty()) {
        rep.messages.push_back("partition has no layers");
        return rep;
    }
    rep.pass = true;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        double c = std::numeric_limits<double>::infinity();
        for (const auto& v : layers[l + 1].vertices()) c = std::min(c, layers[l].insideDistance(v));
        rep.clearances.push_back(c);
        if (!(c > 0)) {
            rep.pass = false;
            std::ostringstream msg;
            msg << "layer " << l + 2 << " is not compactly contained in layer " << l + 1 << " (clearance " << c << ")";
            rep.messages.push_back(msg.str());
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Corona shapes

namespace {

// Arclength position of a boundary point of a convex polygon.
double arcPosition(const ConvexPolygon& poly, const Vec2& p)
{
    double s = 0.0, bestS = 0.0, bestD = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly.vertex(i), b = poly.vertex(i + 1);
        const double len = (b - a).norm();
        const double t = std::clamp((p - a).dot(b - a) / (len * len), 0.0, 1.0);
        const double d = (p - (a + t * (b - a))).norm();
        if (d < bestD) {
            bestD = d;
            bestS = s + t * len;
        }
        s += len;
    }
    return bestS;
}

double perimeter(const ConvexPolygon& poly)
{
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) s += (poly.vertex(i + 1) - poly.vertex(i)).norm();
    return s;
}

// Closed arcs [a, b] on a circle of length P (going forward from a).
bool arcsIntersect(double a0, double len0, double a1, double len1, double P, double tol)
{
    auto inArc = [&](double x, double a, double len) {
        double d = std::fmod(x - a, P);
        if (d < 0) d += P;
        return d <= len + tol || d >= P - tol;
    };
    return inArc(a1, a0, len0) || inArc(a0, a1, len1);
}

}  // namespace

CoronaReport validateCorona(const CoronaShape& shape, int samplesPerSpike)
{
    CoronaReport rep;
    rep.apexesOutside = rep.spikesBounded = rep.basesOnCore = rep.basesDisjoint = true;
    auto fail = [&](bool& flag, const std::string& msg) {
        flag = false;
        rep.messages.push_back(msg);
    };

    if (shape.dim == 2) {
        const auto& core = shape.corePolygon;
        const auto hs = halfSpaces(core);
        const double P = perimeter(core);
        struct Arc {
            double start, length;
        };
        std::vector<Arc> arcs;
        for (std::size_t j = 0; j < shape.spikes.size(); ++j) {
            const auto& sp = shape.spikes[j];
            const Vec2 apex = sp.apex.head<2>();
            const std::string tag = "spike " + std::to_string(j) + ": ";
            if (!(core.insideDistance(apex) < 0)) {
                fail(rep.apexesOutside, tag + "apex is not outside the closed core");
                continue;
            }
            if (!(sp.halfAngle > 0 && sp.halfAngle < kPi / 2)) {
                fail(rep.spikesBounded, tag + "half angle outside (0, pi/2)");
                continue;
            }
            const double phi = std::atan2(sp.axis.y(), sp.axis.x());
            double pos[3];
            bool hit = true;
            const double angles[3] = {phi - sp.halfAngle, phi, phi + sp.halfAngle};
            for (int k = 0; k < 3; ++k) {
                const Vec2 dir(std::cos(angles[k]), std::sin(angles[k]));
                double tIn, tOut;
                if (!clipRay<Vec2>(apex, dir, hs, tIn, tOut)) {
                    hit = false;
                    break;
                }
                pos[k] = arcPosition(core, apex + tIn * dir);
            }
            if (!hit) {
                fail(rep.spikesBounded, tag + "a boundary ray of the cone misses the core");
                fail(rep.basesOnCore, tag + "base is not contained in the core boundary");
                continue;
            }
            // The visible base is the arc between the two boundary hits that
            // contains the hit of the axis ray.
            double fwd = std::fmod(pos[2] - pos[0], P);
            if (fwd < 0) fwd += P;
            double mid = std::fmod(pos[1] - pos[0], P);
            if (mid < 0) mid += P;
            if (mid <= fwd) arcs.push_back({pos[0], fwd});
            else arcs.push_back({pos[2], P - fwd});
        }
        const double tol = 1e-12 * P;
        for (std::size_t i = 0; i < arcs.size(); ++i)
            for (std::size_t j = i + 1; j < arcs.size(); ++j)
                if (arcsIntersect(arcs[i].start, arcs[i].length, arcs[j].start, arcs[j].length, P, tol))
                    fail(rep.basesDisjoint,
                         "bases of spikes " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
    } else {
        const auto& core = shape.corePolyhedron;
        const auto hs = halfSpaces(core);
        // Entry points of sampled rays of each spike (boundary rays first).
        std::vector<std::vector<Vec3>> hits(shape.spikes.size());
        const int nRing = std::max(16, static_cast<int>(std::sqrt(double(samplesPerSpike))));
        for (std::size_t j = 0; j < shape.spikes.size(); ++j) {
            const auto& sp = shape.spikes[j];
            const std::string tag = "spike " + std::to_string(j) + ": ";
            if (!(core.insideDistance(sp.apex) < 0)) {
                fail(rep.apexesOutside, tag + "apex is not outside the closed core");
                continue;
            }
            const Vec3 ax = sp.axis.normalized();
            const Vec3 u = anyOrthogonal(ax), w = ax.cross(u);
            const int nRad = std::max(1, samplesPerSpike / nRing);
            bool allHit = true;
            for (int r = nRad; r >= 0 && allHit; --r) {
                const double ang = sp.halfAngle * r / nRad;
                for (int k = 0; k < (r == 0 ? 1 : nRing); ++k) {
                    const double ph = 2 * kPi * k / nRing;
                    const Vec3 dir =
                        std::cos(ang) * ax + std::sin(ang) * (std::cos(ph) * u + std::sin(ph) * w);
                    double tIn, tOut;
                    if (!clipRay<Vec3>(sp.apex, dir, hs, tIn, tOut)) {
                        allHit = false;
                        break;
                    }
                    hits[j].push_back(sp.apex + tIn * dir);
                }
            }
            if (!allHit) {
                fail(rep.spikesBounded, tag + "a ray of the cone misses the core");
                fail(rep.basesOnCore, tag + "base is not contained in the core boundary");
                hits[j].clear();
            }
        }
        // A sampled base point of spike i lies in the base of spike j when it
        // is inside cone j and is the entry point of the ray from apex j.
        auto clashes = [&](std::size_t i, std::size_t j) {
            const auto& sj = shape.spikes[j];
            const Vec3 ax = sj.axis.normalized();
            for (const auto& q : hits[i]) {
                const Vec3 x = q - sj.apex;
                if (x.normalized().dot(ax) < std::cos(sj.halfAngle)) continue;
                double tIn, tOut;
                if (clipRay<Vec3>(sj.apex, x.normalized(), hs, tIn, tOut) &&
                    std::abs(tIn - x.norm()) <= 1e-9 * std::max(1.0, x.norm()))
                    return true;
            }
            return false;
        };
        for (std::size_t i = 0; i < shape.spikes.size(); ++i)
            for (std::size_t j = i + 1; j < shape.spikes.size(); ++j) {
                if (hits[i].empty() || hits[j].empty()) continue;
                if (clashes(i, j) || clashes(j, i))
                    fail(rep.basesDisjoint,
                         "bases of spikes " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
            }
    }
    rep.pass = rep.apexesOutside && rep.spikesBounded && rep.basesOnCore && rep.basesDisjoint;
    return rep;
}

}  // namespace semilin
