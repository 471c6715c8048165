#include "semilin/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "semilin/errors.hpp"
#include "semilin/fit.hpp"

namespace semilin {

namespace {

std::string typeName(TestedQuantity::Type t)
{
    switch (t) {
    case TestedQuantity::Type::contentGap: return "content_gap";
    case TestedQuantity::Type::distinctness: return "distinctness";
    case TestedQuantity::Type::apexValue: return "apex_value";
    case TestedQuantity::Type::exteriorGap: return "exterior_gap";
    }
    return "unknown";
}

// Forward solves of every measurement on one mesh.
struct Solutions {
    std::shared_ptr<const TriMesh> mesh;
    std::vector<VecC> values;
};

Solutions solveAll(std::shared_ptr<const TriMesh> mesh, const ContentModel& content,
                   const std::vector<BoundaryFunction>& psi, const NewtonOptions& newton)
{
    Solutions s;
    s.mesh = mesh;
    for (const auto& f : psi) s.values.push_back(solveSemilinear(mesh, content, boundaryValues(*mesh, f), newton).values);
    return s;
}

int nodeAt(const TriMesh& mesh, const Vec2& p)
{
    const int n = findNode(mesh, p, 1e-9 * (1.0 + p.norm()));
    if (n < 0) {
        std::ostringstream os;
        os << "vertex (" << p.x() << ", " << p.y() << ") is not a node of the mesh";
        throw MeshError(os.str());
    }
    return n;
}

// Value of one quantity from nodal solution values u_j at the point.
cplx quantityValue(const TestedQuantity& q, const ContentModel& content, const std::vector<cplx>& u)
{
    switch (q.type) {
    case TestedQuantity::Type::contentGap:
    case TestedQuantity::Type::exteriorGap:
        return content.a(q.layer == 0 ? 0 : q.layer - 1, u[0]) - content.a(q.layer == 0 ? 1 : q.layer, u[0]);
    case TestedQuantity::Type::distinctness: {
        cplx p = 1.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = i + 1; j < u.size(); ++j) p *= u[j] - u[i];
        return p;
    }
    case TestedQuantity::Type::apexValue: return u[0];
    }
    return 0.0;
}

cplx evaluate(const TestedQuantity& q, const ContentModel& content, const Solutions& s)
{
    const int n = nodeAt(*s.mesh, q.point);
    std::vector<cplx> u;
    for (int j : q.measurements) u.push_back(s.values[static_cast<std::size_t>(j)][n]);
    return quantityValue(q, content, u);
}

std::vector<int> measurementsOfLayer(const AdmissibilityConfig& c, int layer)
{
    std::vector<int> out;
    for (std::size_t j = 0; j < c.measurements.size(); ++j)
        if (c.measurementLayer.empty() || c.measurementLayer[j] == layer) out.push_back(static_cast<int>(j));
    return out;
}

void addVertexQuantities(std::vector<TestedQuantity>& out, const AdmissibilityConfig& c, int layer,
                         TestedQuantity::Type type, const std::vector<int>& meas)
{
    const ConvexPolygon& poly = c.layers[static_cast<std::size_t>(layer - 1)];
    for (std::size_t v = 0; v < poly.size(); ++v) {
        if (type == TestedQuantity::Type::distinctness) {
            TestedQuantity q;
            q.type = type;
            q.layer = layer;
            q.vertex = static_cast<int>(v);
            q.point = poly.vertex(v);
            q.measurements = meas;
            out.push_back(q);
            continue;
        }
        for (int j : meas) {
            TestedQuantity q;
            q.type = type;
            q.layer = layer;
            q.vertex = static_cast<int>(v);
            q.point = poly.vertex(v);
            q.measurements = {j};
            out.push_back(q);
        }
    }
}

void requireLayers(const AdmissibilityConfig& c, AssumptionKind kind, bool single)
{
    if (c.layers.empty()) throw ConfigError("assumption " + assumptionName(kind) + " needs at least one layer");
    if (single && c.layers.size() != 1) throw ConfigError("assumption " + assumptionName(kind) + " is for one layer");
    if (c.measurements.empty()) throw ConfigError("no measurements to check");
    if (!c.measurementLayer.empty() && c.measurementLayer.size() != c.measurements.size())
        throw ConfigError("measurementLayer needs one entry per measurement");
    if (!(c.hMesh > 0)) throw ConfigError("mesh size must be positive");
    if (!(c.toleranceFactor > 0)) throw ConfigError("tolerance factor must be positive");
}

// Fills value, error, tolerance and pass from the two mesh levels.
void judge(std::vector<TestedQuantity>& qs, const ContentModel& content, const Solutions& coarse,
           const Solutions& fine, double factor)
{
    for (auto& q : qs) {
        const cplx qh = evaluate(q, content, coarse);
        q.value = evaluate(q, content, fine);
        q.error = std::abs(qh - q.value);
        q.tolerance = factor * q.error;
        q.pass = std::abs(q.value) > q.tolerance;
    }
}

void summarize(AdmissibilityReport& r, const std::vector<TestedQuantity>& deciding)
{
    r.worstMargin = std::numeric_limits<double>::infinity();
    r.pass = !deciding.empty();
    for (const auto& q : deciding) {
        r.worstMargin = std::min(r.worstMargin, std::abs(q.value));
        r.pass = r.pass && q.pass;
    }
    if (deciding.empty()) r.worstMargin = 0.0;
    for (const auto& q : r.quantities) r.tolerance = std::max(r.tolerance, q.tolerance);
}

double zetaOf(const PlaneWaveScaling& s, std::size_t layer)
{
    return s.layerZeta.empty() ? 0.5 : (layer < s.layerZeta.size() ? s.layerZeta[layer] : s.layerZeta.back());
}

cplx leadingTerm(const TestedQuantity& q, const ContentModel& content, const std::vector<BoundaryFunction>& psi)
{
    auto lin = [&](int region) {
        if (region == 0) return content.backgroundLambda;
        const auto& l = content.layers[static_cast<std::size_t>(region - 1)];
        return l.empty() ? cplx(0.0) : l[0];
    };
    std::vector<cplx> p;
    for (int j : q.measurements) p.push_back(psi[static_cast<std::size_t>(j)](q.point));
    switch (q.type) {
    case TestedQuantity::Type::contentGap: return (lin(q.layer - 1) - lin(q.layer)) * p[0];
    case TestedQuantity::Type::exteriorGap: return (lin(0) - lin(1)) * p[0];
    case TestedQuantity::Type::distinctness: return quantityValue(q, content, p);
    case TestedQuantity::Type::apexValue: return p[0];
    }
    return 0.0;
}

ExpansionReport expansion(const SmallDataConfig& config, const ContentModel& base, const std::vector<double>& epsGrid)
{
    if (epsGrid.size() < 2) throw ConfigError("the eps grid needs at least two values");
    for (double e : epsGrid)
        if (!(e > 0)) throw ConfigError("eps values must be positive");
    auto mesh = std::make_shared<const TriMesh>(triangulate(config.domain, config.layers, config.hMesh));
    ExpansionReport rep;
    rep.slopeThreshold = config.slopeThreshold;
    std::vector<double> eps, norms;
    for (double e : epsGrid) {
        const ContentModel c = scaledContent(base, config.scaling, e);
        const BoundaryFunction psi = scaledMeasurements(config.scaling, e).front();
        const FemField f = solveSemilinear(mesh, c, boundaryValues(*mesh, psi), config.newton);
        VecC v(f.values.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f.values[i] - psi(mesh->nodes[static_cast<std::size_t>(i)]);
        ExpansionRow row;
        row.eps = e;
        row.k = config.scaling.k0 * std::pow(e, config.scaling.zeta0);
        row.vNorm = h1Norm(*mesh, v);
        row.ratio = row.vNorm / e;
        row.iterations = f.newtonIterations;
        rep.rows.push_back(row);
        eps.push_back(e);
        norms.push_back(row.vNorm);
    }
    rep.slope = fitPowerLaw(eps, norms).slope;
    std::vector<ExpansionRow> sorted = rep.rows;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.eps > b.eps; });
    rep.monotone = true;
    for (std::size_t i = 1; i < sorted.size(); ++i) rep.monotone = rep.monotone && sorted[i].ratio < sorted[i - 1].ratio;
    rep.pass = rep.monotone && rep.slope > rep.slopeThreshold;
    return rep;
}

}  // namespace

std::string assumptionName(AssumptionKind kind)
{
    switch (kind) {
    case AssumptionKind::A: return "A";
    case AssumptionKind::B: return "B";
    case AssumptionKind::C: return "C";
    case AssumptionKind::D: return "D";
    }
    return "?";
}

std::string TestedQuantity::describe() const
{
    std::ostringstream os;
    os << typeName(type);
    if (vertex >= 0)
        os << " at vertex " << vertex << " of layer " << layer;
    else
        os << " at exterior node";
    os << " (" << point.x() << ", " << point.y() << "), measurements";
    for (int j : measurements) os << ' ' << j;
    os << ": |q| = " << std::abs(value) << ", tolerance " << tolerance << (pass ? ", pass" : ", FAIL");
    return os.str();
}

void AdmissibilityReport::writeCsv(std::ostream& os) const
{
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << "type,layer,vertex,x,y,re,im,modulus,tolerance,pass\n";
    for (const auto& q : quantities)
        os << typeName(q.type) << ',' << q.layer << ',' << q.vertex << ',' << q.point.x() << ',' << q.point.y() << ','
           << q.value.real() << ',' << q.value.imag() << ',' << std::abs(q.value) << ',' << q.tolerance << ','
           << (q.pass ? 1 : 0) << '\n';
    os.precision(old);
}

AdmissibilityReport checkAssumption(AssumptionKind kind, const AdmissibilityConfig& config)
{
    const bool single = kind == AssumptionKind::A || kind == AssumptionKind::B;
    requireLayers(config, kind, single);
    if (kind == AssumptionKind::A && config.measurements.size() != 1)
        throw ConfigError("assumption A is for a single measurement");
    if (kind == AssumptionKind::D && config.measurements.size() != 1)
        throw ConfigError("assumption D is for a single measurement");
    ContentModel content = config.content;
    if (kind == AssumptionKind::C) content.classTag = ContentClass::classA;
    if (kind == AssumptionKind::D) content.classTag = ContentClass::classB;
    content.validate();

    auto coarseMesh = std::make_shared<const TriMesh>(triangulate(config.domain, config.layers, config.hMesh));
    auto fineMesh = std::make_shared<const TriMesh>(refine(*coarseMesh));
    const Solutions coarse = solveAll(coarseMesh, content, config.measurements, config.newton);
    const Solutions fine = solveAll(fineMesh, content, config.measurements, config.newton);

    AdmissibilityReport rep;
    rep.kind = kind;
    using T = TestedQuantity::Type;
    const int nLayers = static_cast<int>(config.layers.size());
    switch (kind) {
    case AssumptionKind::A: addVertexQuantities(rep.quantities, config, 1, T::contentGap, {0}); break;
    case AssumptionKind::B: {
        std::vector<int> all(config.measurements.size());
        for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
        addVertexQuantities(rep.quantities, config, 1, T::contentGap, all);
        if (all.size() > 1) addVertexQuantities(rep.quantities, config, 1, T::distinctness, all);
        break;
    }
    case AssumptionKind::C:
        for (int l = 1; l <= nLayers; ++l) {
            const std::vector<int> m = measurementsOfLayer(config, l);
            if (m.empty()) throw ConfigError("layer " + std::to_string(l) + " has no measurements");
            addVertexQuantities(rep.quantities, config, l, T::contentGap, m);
            if (m.size() > 1) addVertexQuantities(rep.quantities, config, l, T::distinctness, m);
        }
        break;
    case AssumptionKind::D:
        for (int l = 1; l <= nLayers; ++l) {
            addVertexQuantities(rep.quantities, config, l, T::contentGap, {0});
            addVertexQuantities(rep.quantities, config, l, T::apexValue, {0});
        }
        break;
    }
    judge(rep.quantities, content, coarse, fine, config.toleranceFactor);
    std::vector<TestedQuantity> deciding = rep.quantities;
    summarize(rep, deciding);

    if (kind == AssumptionKind::A && !rep.pass) {
        // Alternative condition: the gap is nonzero at every node outside the inclusion.
        std::vector<TestedQuantity> exterior;
        const ConvexPolygon& d = config.layers.front();
        for (std::size_t n = 0; n < coarseMesh->nodes.size(); ++n) {
            const Vec2& p = coarseMesh->nodes[n];
            if (d.insideDistance(p) >= -1e-9) continue;
            TestedQuantity q;
            q.type = T::exteriorGap;
            q.layer = 0;
            q.point = p;
            q.measurements = {0};
            exterior.push_back(q);
        }
        judge(exterior, content, coarse, fine, config.toleranceFactor);
        AdmissibilityReport alt = rep;
        alt.quantities.insert(alt.quantities.end(), exterior.begin(), exterior.end());
        alt.tolerance = 0.0;
        summarize(alt, exterior);
        if (alt.pass) {
            alt.note = "vertex gaps vanish; the exterior gap condition holds";
            return alt;
        }
        rep.quantities = alt.quantities;
        rep.tolerance = alt.tolerance;
        rep.note = "neither the vertex gap nor the exterior gap condition holds";
        return rep;
    }
    if (kind == AssumptionKind::A) rep.note = "vertex gap condition holds";
    return rep;
}

ContentModel scaledContent(const ContentModel& base, const PlaneWaveScaling& s, double eps)
{
    if (!(eps > 0)) throw ConfigError("eps must be positive");
    ContentModel c = base;
    const double k = s.k0 * std::pow(eps, s.zeta0);
    c.backgroundLambda = k * k;
    for (std::size_t l = 0; l < c.layers.size(); ++l) {
        const double z = zetaOf(s, l);
        if (std::isnan(z) || c.layers[l].empty()) continue;
        c.layers[l][0] *= std::pow(eps, z);
    }
    return c;
}

std::vector<BoundaryFunction> scaledMeasurements(const PlaneWaveScaling& s, double eps)
{
    if (!(eps > 0)) throw ConfigError("eps must be positive");
    if (s.multipliers.empty()) throw ConfigError("at least one amplitude multiplier is needed");
    const double k = s.k0 * std::pow(eps, s.zeta0);
    const Vec2 d = s.direction.normalized();
    std::vector<BoundaryFunction> out;
    for (double m : s.multipliers)
        out.push_back([a = eps * m, k, d](const Vec2& x) { return a * std::exp(cplx(0.0, k * d.dot(x))); });
    return out;
}

void LeadingOrderReport::writeCsv(std::ostream& os) const
{
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << "eps,type,layer,vertex,modulus,leading,ratio\n";
    for (const auto& r : rows)
        os << r.eps << ',' << typeName(r.quantity.type) << ',' << r.quantity.layer << ',' << r.quantity.vertex << ','
           << std::abs(r.quantity.value) << ',' << std::abs(r.leading) << ',' << r.ratio << '\n';
    os.precision(old);
}

LeadingOrderReport leadingOrderRatios(AssumptionKind kind, const AdmissibilityConfig& geometry,
                                      const PlaneWaveScaling& scaling, const std::vector<double>& epsGrid)
{
    if (epsGrid.empty()) throw ConfigError("the eps grid is empty");
    LeadingOrderReport rep;
    rep.kind = kind;
    const double smallest = *std::min_element(epsGrid.begin(), epsGrid.end());
    rep.minRatio = std::numeric_limits<double>::infinity();
    rep.maxRatio = 0.0;
    for (double e : epsGrid) {
        AdmissibilityConfig c = geometry;
        c.content = scaledContent(geometry.content, scaling, e);
        c.measurements = scaledMeasurements(scaling, e);
        const AdmissibilityReport ar = checkAssumption(kind, c);
        ContentModel content = c.content;
        for (const auto& q : ar.quantities) {
            if (q.type == TestedQuantity::Type::exteriorGap) continue;
            LeadingOrderRow row;
            row.quantity = q;
            row.eps = e;
            row.leading = leadingTerm(q, content, c.measurements);
            row.ratio = std::abs(row.leading) > 0 ? std::abs(q.value) / std::abs(row.leading)
                                                  : std::numeric_limits<double>::infinity();
            if (e == smallest) {
                rep.minRatio = std::min(rep.minRatio, row.ratio);
                rep.maxRatio = std::max(rep.maxRatio, row.ratio);
            }
            rep.rows.push_back(row);
        }
    }
    return rep;
}

void ExpansionReport::writeCsv(std::ostream& os) const
{
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << "eps,v_norm,ratio\n";
    for (const auto& r : rows) os << r.eps << ',' << r.vNorm << ',' << r.ratio << '\n';
    os.precision(old);
}

ExpansionReport smallDataExpansion(const SmallDataConfig& config, const std::vector<double>& epsGrid)
{
    ContentModel base = config.content;
    base.classTag = ContentClass::singleLayer;
    return expansion(config, base, epsGrid);
}

ExpansionReport nestSmallDataExpansion(const SmallDataConfig& config, ContentClass contentClass,
                                       const std::vector<double>& epsGrid)
{
    ContentModel base = config.content;
    base.classTag = contentClass;
    base.validate();
    NestReport nest = validateNest(NestedPartition{config.layers});
    if (!nest.pass) throw ConfigError("layers are not strictly nested");
    return expansion(config, base, epsGrid);
}

}  // namespace semilin
