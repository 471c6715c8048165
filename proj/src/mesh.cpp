#include "semilin/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "semilin/errors.hpp"

namespace semilin {

namespace {

using ld = long double;

ld orient(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return (ld(b.x()) - a.x()) * (ld(c.y()) - a.y()) - (ld(b.y()) - a.y()) * (ld(c.x()) - a.x());
}

// > 0 when d lies strictly inside the circumcircle of counterclockwise abc.
ld incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d)
{
    const ld adx = ld(a.x()) - d.x(), ady = ld(a.y()) - d.y();
    const ld bdx = ld(b.x()) - d.x(), bdy = ld(b.y()) - d.y();
    const ld cdx = ld(c.x()) - d.x(), cdy = ld(c.y()) - d.y();
    const ld ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c)
{
    const ld bx = ld(b.x()) - a.x(), by = ld(b.y()) - a.y();
    const ld cx = ld(c.x()) - a.x(), cy = ld(c.y()) - a.y();
    const ld d = 2 * (bx * cy - by * cx);
    const ld b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    return Vec2(double(a.x() + (cy * b2 - by * c2) / d), double(a.y() + (bx * c2 - cx * b2) / d));
}

bool encroaches(const Vec2& p, const Vec2& a, const Vec2& b) { return (a - p).dot(b - p) < 0.0; }

// Incremental Bowyer-Watson triangulation with a bounding super-triangle at
// node indices 0, 1, 2.
class Delaunay {
public:
    struct Tri {
        std::array<int, 3> v;
        Vec2 center;
        double r2;
        bool alive;
    };

    Delaunay(const Vec2& lo, const Vec2& hi)
    {
        const Vec2 c = 0.5 * (lo + hi);
        const double s = 100.0 * std::max({(hi - lo).norm(), 1e-3});
        pts_.push_back(c + Vec2(-s, -s));
        pts_.push_back(c + Vec2(s, -s));
        pts_.push_back(c + Vec2(0.0, s));
        addTri({0, 1, 2});
    }

    const std::vector<Vec2>& points() const { return pts_; }
    const std::vector<Tri>& tris() const { return tris_; }

    int insert(const Vec2& p)
    {
        const int id = static_cast<int>(pts_.size());
        pts_.push_back(p);
        const double eps = 1e-13;

        int seed = -1;
        for (std::size_t t = 0; t < tris_.size() && seed < 0; ++t) {
            if (!tris_[t].alive) continue;
            const auto& v = tris_[t].v;
            const ld area = orient(pts_[v[0]], pts_[v[1]], pts_[v[2]]);
            const ld tol = -eps * area;
            if (orient(pts_[v[0]], pts_[v[1]], p) >= tol && orient(pts_[v[1]], pts_[v[2]], p) >= tol &&
                orient(pts_[v[2]], pts_[v[0]], p) >= tol)
                seed = static_cast<int>(t);
        }
        if (seed < 0) throw MeshError("point outside the triangulation");

        std::vector<int> bad;
        std::set<int> badSet;
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            if (!tris_[t].alive) continue;
            const auto& tri = tris_[t];
            const double d2 = (p - tri.center).squaredNorm();
            if (d2 > tri.r2 * (1 + 1e-9)) continue;
            if (static_cast<int>(t) == seed ||
                incircle(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]], p) > 0) {
                bad.push_back(static_cast<int>(t));
                badSet.insert(static_cast<int>(t));
            }
        }

        // Keep the component around the seed and shrink it until every
        // boundary edge sees the new point on its left.
        for (int guard = 0;; ++guard) {
            if (guard > 1000) throw MeshError("cavity repair did not converge");
            std::map<std::pair<int, int>, std::vector<int>> edgeOwners;
            for (int t : badSet) {
                const auto& v = tris_[t].v;
                for (int k = 0; k < 3; ++k) {
                    const int a = v[k], b = v[(k + 1) % 3];
                    edgeOwners[{std::min(a, b), std::max(a, b)}].push_back(t);
                }
            }
            std::set<int> comp{seed};
            std::vector<int> stack{seed};
            while (!stack.empty()) {
                const int t = stack.back();
                stack.pop_back();
                const auto& v = tris_[t].v;
                for (int k = 0; k < 3; ++k) {
                    const int a = v[k], b = v[(k + 1) % 3];
                    for (int u : edgeOwners[{std::min(a, b), std::max(a, b)}])
                        if (!comp.count(u)) {
                            comp.insert(u);
                            stack.push_back(u);
                        }
                }
            }
            badSet = comp;
            std::map<std::pair<int, int>, int> count;
            for (int t : badSet) {
                const auto& v = tris_[t].v;
                for (int k = 0; k < 3; ++k) {
                    const int a = v[k], b = v[(k + 1) % 3];
                    ++count[{std::min(a, b), std::max(a, b)}];
                }
            }
            int offender = -1;
            boundary_.clear();
            for (int t : badSet) {
                const auto& v = tris_[t].v;
                for (int k = 0; k < 3; ++k) {
                    const int a = v[k], b = v[(k + 1) % 3];
                    if (count[{std::min(a, b), std::max(a, b)}] != 1) continue;
                    const ld o = orient(pts_[a], pts_[b], p);
                    const ld scale = (ld(pts_[b].x()) - pts_[a].x()) * (ld(pts_[b].x()) - pts_[a].x()) +
                                     (ld(pts_[b].y()) - pts_[a].y()) * (ld(pts_[b].y()) - pts_[a].y());
                    if (o <= 1e-14L * scale && t != seed) offender = t;
                    boundary_.push_back({a, b});
                }
            }
            if (offender < 0) break;
            badSet.erase(offender);
        }
        for (int t : badSet) tris_[t].alive = false;
        for (const auto& [a, b] : boundary_) addTri({a, b, id});
        if (++inserts_ % 256 == 0) compact();
        return id;
    }

private:
    void addTri(std::array<int, 3> v)
    {
        const Vec2 c = circumcenter(pts_[v[0]], pts_[v[1]], pts_[v[2]]);
        tris_.push_back({v, c, (pts_[v[0]] - c).squaredNorm(), true});
    }

    void compact()
    {
        std::vector<Tri> keep;
        keep.reserve(tris_.size());
        for (auto& t : tris_)
            if (t.alive) keep.push_back(t);
        tris_.swap(keep);
    }

    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    std::vector<std::pair<int, int>> boundary_;
    int inserts_ = 0;
};

struct Subsegment {
    int a, b;
    int owner;  // -1 for the outer boundary, otherwise the interface index
};

bool isAxisAlignedRectangle(const ConvexPolygon& p)
{
    if (p.size() != 4) return false;
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec2 e = p.vertex(i + 1) - p.vertex(i);
        if (e.x() != 0.0 && e.y() != 0.0) return false;
    }
    return true;
}

void checkInterfaces(const ConvexPolygon& outer, const std::vector<ConvexPolygon>& interfaces)
{
    for (std::size_t i = 0; i < interfaces.size(); ++i) {
        for (const auto& v : interfaces[i].vertices())
            if (!(outer.insideDistance(v) > 0))
                throw MeshError("interface " + std::to_string(i) + " is not strictly inside the outer boundary");
        for (std::size_t j = i + 1; j < interfaces.size(); ++j) {
            const auto& a = interfaces[i];
            const auto& b = interfaces[j];
            double sep = std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < a.size(); ++p)
                for (std::size_t q = 0; q < b.size(); ++q)
                    sep = std::min(sep, segmentSegmentDistance(a.vertex(p), a.vertex(p + 1), b.vertex(q), b.vertex(q + 1)));
            if (!(sep > 0))
                throw MeshError("interfaces " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
        }
    }
}

int innermostRegion(const std::vector<ConvexPolygon>& interfaces, const Vec2& p)
{
    int tag = 0;
    double area = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < interfaces.size(); ++i)
        if (interfaces[i].insideDistance(p) > 0 && interfaces[i].area() < area) {
            area = interfaces[i].area();
            tag = static_cast<int>(i) + 1;
        }
    return tag;
}

// Region tags, boundary loop and validation shared by both mesh builders.
void finishMesh(TriMesh& m, const std::vector<ConvexPolygon>& interfaces)
{
    m.regionTag.resize(m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        auto& tri = m.triangles[t];
        if (orient(m.nodes[tri[0]], m.nodes[tri[1]], m.nodes[tri[2]]) < 0) std::swap(tri[1], tri[2]);
        const Vec2 c = (m.nodes[tri[0]] + m.nodes[tri[1]] + m.nodes[tri[2]]) / 3.0;
        m.regionTag[t] = innermostRegion(interfaces, c);
    }

    std::map<std::pair<int, int>, int> count;
    for (const auto& tri : m.triangles)
        for (int k = 0; k < 3; ++k) ++count[{std::min(tri[k], tri[(k + 1) % 3]), std::max(tri[k], tri[(k + 1) % 3])}];
    std::map<int, int> next;
    for (const auto& tri : m.triangles)
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            if (count[{std::min(a, b), std::max(a, b)}] == 1) next[a] = b;
        }
    if (next.empty()) throw MeshError("mesh has no boundary");
    int start = next.begin()->first;
    for (const auto& [a, b] : next) {
        const Vec2& p = m.nodes[a];
        const Vec2& s = m.nodes[start];
        if (p.y() < s.y() || (p.y() == s.y() && p.x() < s.x())) start = a;
    }
    m.boundaryEdges.clear();
    int cur = start;
    do {
        const int nb = next.at(cur);
        const Vec2 e = (m.nodes[nb] - m.nodes[cur]).normalized();
        m.boundaryEdges.push_back({cur, nb, Vec2(e.y(), -e.x())});
        cur = nb;
        if (m.boundaryEdges.size() > next.size()) throw MeshError("boundary is not a single loop");
    } while (cur != start);
    m.validate();
}

TriMesh structuredRectangle(const ConvexPolygon& outer, double h)
{
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    for (const auto& v : outer.vertices()) {
        x0 = std::min(x0, v.x());
        x1 = std::max(x1, v.x());
        y0 = std::min(y0, v.y());
        y1 = std::max(y1, v.y());
    }
    const int nx = std::max(1, static_cast<int>(std::ceil((x1 - x0) / h - 1e-12)));
    const int ny = std::max(1, static_cast<int>(std::ceil((y1 - y0) / h - 1e-12)));
    TriMesh m;
    m.meshSize = h;
    auto gx = [&](int i) { return i == nx ? x1 : x0 + (x1 - x0) * i / nx; };
    auto gy = [&](int j) { return j == ny ? y1 : y0 + (y1 - y0) * j / ny; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) m.nodes.emplace_back(gx(i), gy(j));
    const int corner = static_cast<int>(m.nodes.size());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) m.nodes.emplace_back(0.5 * (gx(i) + gx(i + 1)), 0.5 * (gy(j) + gy(j + 1)));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int a = j * (nx + 1) + i, b = a + 1, c = a + nx + 1 + 1, d = a + nx + 1;
            const int z = corner + j * nx + i;
            m.triangles.push_back({a, b, z});
            m.triangles.push_back({b, c, z});
            m.triangles.push_back({c, d, z});
            m.triangles.push_back({d, a, z});
        }
    finishMesh(m, {});
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------

double TriMesh::triangleArea(std::size_t t) const
{
    const auto& tri = triangles[t];
    return 0.5 * double(orient(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]));
}

double TriMesh::maxEdgeLength() const
{
    double h = 0.0;
    for (const auto& tri : triangles)
        for (int k = 0; k < 3; ++k) h = std::max(h, (nodes[tri[k]] - nodes[tri[(k + 1) % 3]]).norm());
    return h;
}

double TriMesh::maxCircumradius() const
{
    double r = 0.0;
    for (const auto& tri : triangles) {
        const Vec2 c = circumcenter(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
        r = std::max(r, (nodes[tri[0]] - c).norm());
    }
    return r;
}

std::vector<int> TriMesh::boundaryNodes() const
{
    std::vector<int> out;
    out.reserve(boundaryEdges.size());
    for (const auto& e : boundaryEdges) out.push_back(e.a);
    return out;
}

void TriMesh::validate() const
{
    if (regionTag.size() != triangles.size()) throw MeshError("region tag count differs from triangle count");
    if (!regionFraction.empty() && regionFraction.size() != triangles.size())
        throw MeshError("region fraction count differs from triangle count");
    const int n = static_cast<int>(nodes.size());
    std::map<std::pair<int, int>, int> count;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        for (int k = 0; k < 3; ++k)
            if (tri[k] < 0 || tri[k] >= n) throw MeshError("triangle references a missing node");
        if (!(triangleArea(t) > 0)) throw MeshError("triangle " + std::to_string(t) + " has non-positive area");
        for (int k = 0; k < 3; ++k) ++count[{std::min(tri[k], tri[(k + 1) % 3]), std::max(tri[k], tri[(k + 1) % 3])}];
    }
    std::size_t free = 0;
    for (const auto& [e, c] : count) {
        if (c > 2) throw MeshError("edge shared by more than two triangles");
        if (c == 1) ++free;
    }
    if (free != boundaryEdges.size()) throw MeshError("boundary loop does not match the free edges");
    for (std::size_t i = 0; i < boundaryEdges.size(); ++i) {
        const auto& e = boundaryEdges[i];
        if (count[{std::min(e.a, e.b), std::max(e.a, e.b)}] != 1) throw MeshError("boundary edge is not free");
        if (e.b != boundaryEdges[(i + 1) % boundaryEdges.size()].a) throw MeshError("boundary edges are not a loop");
    }
    // Hanging nodes show up as nodes on a free edge interior without a
    // matching free-edge split; a manifold edge count plus one closed boundary
    // loop excludes them for a simply connected domain.
}

TriMesh triangulate(const ConvexPolygon& outer, const std::vector<ConvexPolygon>& interfaces, double hMesh)
{
    if (!(hMesh > 0) || !std::isfinite(hMesh)) throw MeshError("mesh size must be positive");
    checkInterfaces(outer, interfaces);
    if (interfaces.empty() && isAxisAlignedRectangle(outer)) return structuredRectangle(outer, hMesh);

    Vec2 lo = outer.vertex(0), hi = outer.vertex(0);
    for (const auto& v : outer.vertices()) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    const double diam = (hi - lo).norm();
    if (hMesh < 1e-4 * diam) throw MeshError("mesh size too small for this domain");

    std::vector<Vec2> pts;
    std::vector<Subsegment> segs;
    auto addPolygon = [&](const ConvexPolygon& poly, int owner) {
        const int first = static_cast<int>(pts.size());
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = poly.vertex(i), b = poly.vertex(i + 1);
            const int k = std::max(1, static_cast<int>(std::ceil((b - a).norm() / hMesh - 1e-12)));
            for (int s = 0; s < k; ++s) pts.push_back(a + (b - a) * (double(s) / k));
        }
        const int last = static_cast<int>(pts.size());
        for (int i = first; i < last; ++i) segs.push_back({i, i + 1 < last ? i + 1 : first, owner});
    };
    addPolygon(outer, -1);
    for (std::size_t i = 0; i < interfaces.size(); ++i) addPolygon(interfaces[i], static_cast<int>(i));

    auto splitEncroached = [&](std::vector<Vec2>& points) {
        for (int pass = 0;; ++pass) {
            if (pass > 60) throw MeshError("boundary subsegment splitting did not terminate");
            bool changed = false;
            std::vector<Subsegment> next;
            for (const auto& s : segs) {
                bool hit = false;
                for (std::size_t p = 0; p < points.size() && !hit; ++p)
                    if (static_cast<int>(p) != s.a && static_cast<int>(p) != s.b &&
                        encroaches(points[p], points[s.a], points[s.b]))
                        hit = true;
                if (!hit) {
                    next.push_back(s);
                    continue;
                }
                const int m = static_cast<int>(points.size());
                points.push_back(0.5 * (points[s.a] + points[s.b]));
                next.push_back({s.a, m, s.owner});
                next.push_back({m, s.b, s.owner});
                changed = true;
            }
            segs.swap(next);
            if (!changed) return;
        }
    };
    splitEncroached(pts);

    // Interior hexagonal lattice anchored at the lower-left corner of the
    // bounding box, thinned near every boundary.
    std::vector<const ConvexPolygon*> polys{&outer};
    for (const auto& p : interfaces) polys.push_back(&p);
    const double dy = 0.5 * std::sqrt(3.0) * hMesh;
    for (int j = 0;; ++j) {
        const double y = lo.y() + j * dy;
        if (y > hi.y()) break;
        for (int i = 0;; ++i) {
            const double x = lo.x() + (i + 0.5 * (j % 2)) * hMesh;
            if (x > hi.x()) break;
            const Vec2 p(x, y);
            if (!(outer.insideDistance(p) > 0.5 * hMesh)) continue;
            bool keep = true;
            for (std::size_t q = 1; q < polys.size() && keep; ++q)
                for (std::size_t e = 0; e < polys[q]->size() && keep; ++e)
                    if (segmentDistance(p, polys[q]->vertex(e), polys[q]->vertex(e + 1)) <= 0.5 * hMesh) keep = false;
            for (const auto& s : segs)
                if (keep && encroaches(p, pts[s.a], pts[s.b])) keep = false;
            if (keep) pts.push_back(p);
        }
    }

    Delaunay dt(lo, hi);
    for (const auto& p : pts) dt.insert(p);
    // Delaunay ids are point ids shifted by the three super-triangle nodes.
    auto dtPoint = [&](int id) { return dt.points()[id + 3]; };

    const std::size_t budget = 40 * pts.size() + 1000;
    auto splitSegment = [&](std::size_t si) {
        const Subsegment s = segs[si];
        const int m = dt.insert(0.5 * (dtPoint(s.a) + dtPoint(s.b))) - 3;
        segs[si] = {s.a, m, s.owner};
        segs.push_back({m, s.b, s.owner});
    };
    auto fixEncroachment = [&]() {
        for (int pass = 0;; ++pass) {
            if (pass > 200) throw MeshError("encroachment repair did not terminate");
            bool changed = false;
            const auto& P = dt.points();
            for (std::size_t si = 0; si < segs.size(); ++si) {
                const Vec2 a = dtPoint(segs[si].a), b = dtPoint(segs[si].b);
                const Vec2 mid = 0.5 * (a + b);
                const double r2 = 0.25 * (b - a).squaredNorm();
                for (std::size_t p = 3; p < P.size(); ++p) {
                    const int id = static_cast<int>(p) - 3;
                    if (id == segs[si].a || id == segs[si].b) continue;
                    if ((P[p] - mid).squaredNorm() < r2 && encroaches(P[p], a, b)) {
                        splitSegment(si);
                        changed = true;
                        break;
                    }
                }
            }
            if (!changed) return;
        }
    };
    fixEncroachment();

    // Size refinement: insert circumcenters of oversized triangles unless
    // they encroach a subsegment, in which case the subsegment is split.
    for (;;) {
        if (dt.points().size() > budget) throw MeshError("mesh refinement exceeded its point budget");
        double worst = hMesh * (1 + 1e-9);
        int worstTri = -1;
        const auto& tris = dt.tris();
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!tris[t].alive) continue;
            const auto& v = tris[t].v;
            if (v[0] < 3 || v[1] < 3 || v[2] < 3) continue;
            const double r = std::sqrt(tris[t].r2);
            if (r > worst) {
                worst = r;
                worstTri = static_cast<int>(t);
            }
        }
        if (worstTri < 0) break;
        const Vec2 c = tris[worstTri].center;
        std::vector<std::size_t> hit;
        for (std::size_t si = 0; si < segs.size(); ++si)
            if (encroaches(c, dtPoint(segs[si].a), dtPoint(segs[si].b))) hit.push_back(si);
        if (hit.empty() && !(outer.insideDistance(c) > 0)) {
            std::size_t nearest = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t si = 0; si < segs.size(); ++si) {
                if (segs[si].owner != -1) continue;
                const double d = segmentDistance(c, dtPoint(segs[si].a), dtPoint(segs[si].b));
                if (d < best) {
                    best = d;
                    nearest = si;
                }
            }
            hit.push_back(nearest);
        }
        if (hit.empty()) {
            dt.insert(c);
        } else {
            std::sort(hit.rbegin(), hit.rend());
            for (std::size_t si : hit) splitSegment(si);
        }
        fixEncroachment();
    }

    TriMesh m;
    m.meshSize = hMesh;
    m.nodes.assign(dt.points().begin() + 3, dt.points().end());
    for (const auto& t : dt.tris()) {
        if (!t.alive || t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
        m.triangles.push_back({t.v[0] - 3, t.v[1] - 3, t.v[2] - 3});
    }
    std::set<std::pair<int, int>> edges;
    for (const auto& tri : m.triangles)
        for (int k = 0; k < 3; ++k) edges.insert({std::min(tri[k], tri[(k + 1) % 3]), std::max(tri[k], tri[(k + 1) % 3])});
    for (const auto& s : segs)
        if (!edges.count({std::min(s.a, s.b), std::max(s.a, s.b)}))
            throw MeshError("a boundary or interface subsegment is missing from the triangulation");
    finishMesh(m, interfaces);
    return m;
}

TriMesh refine(const TriMesh& mesh)
{
    TriMesh out;
    out.meshSize = 0.5 * mesh.meshSize;
    out.nodes = mesh.nodes;
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        const auto it = mid.find(key);
        if (it != mid.end()) return it->second;
        const int id = static_cast<int>(out.nodes.size());
        out.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
        mid.emplace(key, id);
        return id;
    };
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto [a, b, c] = mesh.triangles[t];
        const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
        out.triangles.push_back({a, ab, ca});
        out.triangles.push_back({ab, b, bc});
        out.triangles.push_back({ca, bc, c});
        out.triangles.push_back({ab, bc, ca});
        for (int k = 0; k < 4; ++k) out.regionTag.push_back(mesh.regionTag[t]);
    }
    for (const auto& e : mesh.boundaryEdges) {
        const int m = midpoint(e.a, e.b);
        out.boundaryEdges.push_back({e.a, m, e.normal});
        out.boundaryEdges.push_back({m, e.b, e.normal});
    }
    out.validate();
    return out;
}

double clippedArea(const std::array<Vec2, 3>& tri, const ConvexPolygon& poly)
{
    // Sutherland-Hodgman against each edge of the counterclockwise polygon.
    std::vector<Vec2> cur(tri.begin(), tri.end());
    if (orient(tri[0], tri[1], tri[2]) < 0) std::swap(cur[1], cur[2]);
    for (std::size_t i = 0; i < poly.size() && !cur.empty(); ++i) {
        const Vec2 a = poly.vertex(i), b = poly.vertex(i + 1);
        const Vec2 n(b.y() - a.y(), a.x() - b.x());  // outward
        std::vector<Vec2> next;
        for (std::size_t k = 0; k < cur.size(); ++k) {
            const Vec2& p = cur[k];
            const Vec2& q = cur[(k + 1) % cur.size()];
            const double sp = n.dot(p - a), sq = n.dot(q - a);
            if (sp <= 0) next.push_back(p);
            if ((sp < 0 && sq > 0) || (sp > 0 && sq < 0)) next.push_back(p + (sp / (sp - sq)) * (q - p));
        }
        cur = std::move(next);
    }
    double area = 0.0;
    for (std::size_t k = 0; k < cur.size(); ++k) {
        const Vec2& p = cur[k];
        const Vec2& q = cur[(k + 1) % cur.size()];
        area += p.x() * q.y() - p.y() * q.x();
    }
    return std::max(0.0, 0.5 * area);
}

TriMesh embedNest(const TriMesh& mesh, const std::vector<ConvexPolygon>& nest)
{
    for (std::size_t l = 1; l < nest.size(); ++l)
        for (const Vec2& v : nest[l].vertices())
            if (!nest[l - 1].containsStrictly(v))
                throw GeometryError("nest polygon " + std::to_string(l + 1) + " is not strictly inside polygon " +
                                    std::to_string(l));
    TriMesh out = mesh;
    const std::size_t regions = nest.size() + 1;
    out.regionFraction.assign(mesh.triangles.size(), std::vector<double>(regions, 0.0));
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const std::array<Vec2, 3> pts{mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]};
        const double area = mesh.triangleArea(t);
        auto& w = out.regionFraction[t];
        double inside = 1.0;  // fraction inside the previous polygon
        for (std::size_t l = 0; l < nest.size(); ++l) {
            const double f = inside > 0 ? std::min(inside, clippedArea(pts, nest[l]) / area) : 0.0;
            w[l] = inside - f;
            inside = f;
        }
        w[nest.size()] = inside;
        out.regionTag[t] = static_cast<int>(std::max_element(w.begin(), w.end()) - w.begin());
    }
    return out;
}

int findNode(const TriMesh& mesh, const Vec2& p, double tol)
{
    int best = -1;
    double bestD = tol;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const double d = (mesh.nodes[i] - p).norm();
        if (d <= bestD) {
            bestD = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

PointLocation locatePoint(const TriMesh& mesh, const Vec2& p, double tol)
{
    PointLocation loc;
    double bestMin = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec2 a = mesh.nodes[tri[0]], b = mesh.nodes[tri[1]], c = mesh.nodes[tri[2]];
        const double area = double(orient(a, b, c));
        const std::array<double, 3> bary{double(orient(b, c, p)) / area, double(orient(c, a, p)) / area,
                                         double(orient(a, b, p)) / area};
        const double mn = std::min({bary[0], bary[1], bary[2]});
        if (mn > bestMin) {
            bestMin = mn;
            loc.triangle = static_cast<int>(t);
            loc.bary = bary;
        }
    }
    if (bestMin < -tol) loc.triangle = -1;
    return loc;
}

void writeMesh(std::ostream& os, const TriMesh& mesh)
{
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << "nodes " << mesh.nodes.size() << " triangles " << mesh.triangles.size() << '\n';
    for (const auto& p : mesh.nodes) os << p.x() << ' ' << p.y() << '\n';
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << mesh.regionTag[t] << '\n';
    }
    os << "boundary " << mesh.boundaryEdges.size() << '\n';
    for (const auto& e : mesh.boundaryEdges) os << e.a << ' ' << e.b << ' ' << e.normal.x() << ' ' << e.normal.y() << '\n';
    os << "meshsize " << mesh.meshSize << '\n';
    os.precision(old);
}

TriMesh readMesh(std::istream& is)
{
    auto expect = [&](const char* word) {
        std::string w;
        if (!(is >> w) || w != word) throw MeshError(std::string("mesh file: expected '") + word + "'");
    };
    TriMesh m;
    std::size_t n = 0, t = 0, b = 0;
    expect("nodes");
    is >> n;
    expect("triangles");
    is >> t;
    if (!is) throw MeshError("mesh file: bad header");
    m.nodes.resize(n);
    for (auto& p : m.nodes) is >> p.x() >> p.y();
    m.triangles.resize(t);
    m.regionTag.resize(t);
    for (std::size_t i = 0; i < t; ++i) is >> m.triangles[i][0] >> m.triangles[i][1] >> m.triangles[i][2] >> m.regionTag[i];
    expect("boundary");
    is >> b;
    m.boundaryEdges.resize(b);
    for (auto& e : m.boundaryEdges) is >> e.a >> e.b >> e.normal.x() >> e.normal.y();
    expect("meshsize");
    is >> m.meshSize;
    if (!is) throw MeshError("mesh file: truncated");
    m.validate();
    return m;
}

}  // namespace semilin
