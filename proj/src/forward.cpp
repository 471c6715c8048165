#include "semilin/forward.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/SparseLU>

#include "semilin/errors.hpp"
#include "semilin/quadrature.hpp"

namespace semilin {

namespace {

struct Element {
    std::array<Vec2, 3> grad;  // gradients of the three hat functions
    double area;
};

Element element(const TriMesh& mesh, std::size_t t)
{
    const auto& tri = mesh.triangles[t];
    const Vec2 p0 = mesh.nodes[tri[0]], p1 = mesh.nodes[tri[1]], p2 = mesh.nodes[tri[2]];
    const double twoA = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
    Element e;
    e.area = 0.5 * twoA;
    e.grad[0] = Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / twoA;
    e.grad[1] = Vec2(p2.y() - p0.y(), p0.x() - p2.x()) / twoA;
    e.grad[2] = Vec2(p0.y() - p1.y(), p1.x() - p0.x()) / twoA;
    return e;
}

bool identicalCoefficients(std::vector<cplx> a, std::vector<cplx> b)
{
    while (!a.empty() && a.back() == cplx(0.0)) a.pop_back();
    while (!b.empty() && b.back() == cplx(0.0)) b.pop_back();
    return a == b;
}

SparseC reduce(const SparseC& full, const std::vector<int>& reducedIndex, int nInterior)
{
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(full.nonZeros());
    for (int k = 0; k < full.outerSize(); ++k)
        for (SparseC::InnerIterator it(full, k); it; ++it) {
            const int r = reducedIndex[it.row()], c = reducedIndex[it.col()];
            if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
        }
    SparseC m(nInterior, nInterior);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

double interiorNorm(const VecC& r, const std::vector<int>& interior)
{
    double s = 0.0;
    for (int i : interior) s += std::norm(r[i]);
    return std::sqrt(s);
}

// Content (or its derivative) on triangle t, blended by region fractions when present.
cplx cellContent(const TriMesh& mesh, const ContentModel& c, std::size_t t, cplx u, bool derivative)
{
    if (mesh.regionFraction.empty()) return derivative ? c.da(mesh.regionTag[t], u) : c.a(mesh.regionTag[t], u);
    cplx s = 0.0;
    const auto& w = mesh.regionFraction[t];
    for (std::size_t r = 0; r < w.size(); ++r)
        if (w[r] != 0.0) s += w[r] * (derivative ? c.da(static_cast<int>(r), u) : c.a(static_cast<int>(r), u));
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// ContentModel

void ContentModel::validate() const
{
    if (!std::isfinite(backgroundLambda.real()) || !std::isfinite(backgroundLambda.imag()))
        throw ConfigError("background coefficient is not finite");
    for (std::size_t l = 0; l < layers.size(); ++l)
        for (const auto& c : layers[l])
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw ConfigError("layer " + std::to_string(l + 1) + " has a non-finite coefficient");
    if (classTag == ContentClass::classA) {
        for (std::size_t l = 0; l + 1 < layers.size(); ++l)
            if (identicalCoefficients(layers[l], layers[l + 1]))
                throw ConfigError("class A layers " + std::to_string(l + 1) + " and " + std::to_string(l + 2) +
                                  " have identical coefficient vectors");
    } else if (classTag == ContentClass::classB) {
        const std::size_t n = layers.size();
        for (std::size_t l = 0; l + 1 < n; ++l) {
            std::vector<cplx> c = layers[l];
            while (c.size() > 1 && c.back() == cplx(0.0)) c.pop_back();
            if (c.size() != 1) throw ConfigError("class B layer " + std::to_string(l + 1) + " must be linear");
        }
        for (std::size_t l = 0; l + 2 < n; ++l)
            if (layers[l][0] == layers[l + 1][0])
                throw ConfigError("class B layers " + std::to_string(l + 1) + " and " + std::to_string(l + 2) +
                                  " have equal coefficients");
    }
}

void ContentModel::checkRegions(const TriMesh& mesh) const
{
    for (int tag : mesh.regionTag)
        if (tag < 0 || tag > static_cast<int>(layers.size()))
            throw ConfigError("mesh region " + std::to_string(tag) + " has no content coefficients");
    for (const auto& w : mesh.regionFraction)
        if (w.size() > layers.size() + 1)
            throw ConfigError("mesh region " + std::to_string(w.size() - 1) + " has no content coefficients");
}

cplx ContentModel::a(int region, cplx u) const
{
    if (region == 0) return backgroundLambda * u;
    const auto& c = layers[region - 1];
    cplx s = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) s = (s + c[j]) * u;
    return s;
}

cplx ContentModel::da(int region, cplx u) const
{
    if (region == 0) return backgroundLambda;
    const auto& c = layers[region - 1];
    cplx s = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) s = s * u + double(j + 1) * c[j];
    return s;
}

// ---------------------------------------------------------------------------
// FemField, CauchyData

VecC FemField::boundaryTrace() const
{
    const auto nodes = mesh->boundaryNodes();
    VecC out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = values[nodes[i]];
    return out;
}

cplx FemField::evaluate(const Vec2& p) const
{
    const PointLocation loc = locatePoint(*mesh, p, 1e-10);
    if (loc.triangle < 0) throw MeshError("evaluation point outside the mesh");
    const auto& tri = mesh->triangles[loc.triangle];
    return loc.bary[0] * values[tri[0]] + loc.bary[1] * values[tri[1]] + loc.bary[2] * values[tri[2]];
}

void CauchyData::validate() const
{
    const auto n = static_cast<Eigen::Index>(nodes.size());
    if (psi.size() != n || dnu.size() != n || weights.size() != n || coords.size() != nodes.size())
        throw SolverError("Cauchy data arrays have inconsistent lengths");
}

void CauchyData::writeCsv(std::ostream& os) const
{
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << "node,x,y,re_psi,im_psi,re_dnu,im_dnu\n";
    for (std::size_t i = 0; i < nodes.size(); ++i)
        os << nodes[i] << ',' << coords[i].x() << ',' << coords[i].y() << ',' << psi[i].real() << ','
           << psi[i].imag() << ',' << dnu[i].real() << ',' << dnu[i].imag() << '\n';
    os.precision(old);
}

// ---------------------------------------------------------------------------
// Assembly

SparseC assembleStiffness(const TriMesh& mesh)
{
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(9 * mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Element e = element(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], e.area * e.grad[i].dot(e.grad[j]));
    }
    const int n = static_cast<int>(mesh.nodes.size());
    SparseC k(n, n);
    k.setFromTriplets(trip.begin(), trip.end());
    return k;
}

SparseC assembleMass(const TriMesh& mesh, const std::vector<cplx>& regionCoefficient)
{
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(9 * mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const double area = mesh.triangleArea(t);
        const cplx c = regionCoefficient.empty() ? cplx(1.0) : regionCoefficient.at(mesh.regionTag[t]);
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], c * area * (i == j ? 1.0 / 6 : 1.0 / 12));
    }
    const int n = static_cast<int>(mesh.nodes.size());
    SparseC m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

SparseC assembleBoundaryMass(const TriMesh& mesh)
{
    std::vector<Eigen::Triplet<cplx>> trip;
    for (const auto& e : mesh.boundaryEdges) {
        const double len = (mesh.nodes[e.b] - mesh.nodes[e.a]).norm();
        trip.emplace_back(e.a, e.a, len / 3);
        trip.emplace_back(e.b, e.b, len / 3);
        trip.emplace_back(e.a, e.b, len / 6);
        trip.emplace_back(e.b, e.a, len / 6);
    }
    const int n = static_cast<int>(mesh.nodes.size());
    SparseC m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

LinearizedSystem assembleLinearized(const TriMesh& mesh, const ContentModel& content, const VecC& uCurrent)
{
    const int n = static_cast<int>(mesh.nodes.size());
    if (uCurrent.size() != n) throw SolverError("field does not match the mesh");
    content.checkRegions(mesh);
    const auto& rule = triangleRule();
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(9 * mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Element e = element(mesh, t);
        const auto& tri = mesh.triangles[t];
        cplx m[3][3] = {};
        for (const auto& q : rule) {
            const double phi[3] = {q.l0, q.l1, q.l2};
            const cplx u = phi[0] * uCurrent[tri[0]] + phi[1] * uCurrent[tri[1]] + phi[2] * uCurrent[tri[2]];
            const cplx d = cellContent(mesh, content, t, u, true) * (q.weight * e.area);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) m[i][j] += d * phi[i] * phi[j];
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], e.area * e.grad[i].dot(e.grad[j]) - m[i][j]);
    }
    LinearizedSystem sys;
    sys.full.resize(n, n);
    sys.full.setFromTriplets(trip.begin(), trip.end());
    sys.reducedIndex.assign(n, 0);
    for (const auto& e : mesh.boundaryEdges) sys.reducedIndex[e.a] = sys.reducedIndex[e.b] = -1;
    for (int i = 0; i < n; ++i)
        if (sys.reducedIndex[i] == 0) {
            sys.reducedIndex[i] = static_cast<int>(sys.interior.size());
            sys.interior.push_back(i);
        }
    sys.reduced = reduce(sys.full, sys.reducedIndex, static_cast<int>(sys.interior.size()));
    return sys;
}

VecC weakResidual(const TriMesh& mesh, const ContentModel& content, const VecC& u)
{
    const int n = static_cast<int>(mesh.nodes.size());
    if (u.size() != n) throw SolverError("field does not match the mesh");
    const auto& rule = triangleRule();
    VecC r = VecC::Zero(n);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Element e = element(mesh, t);
        const auto& tri = mesh.triangles[t];
        Eigen::Vector2cd grad = Eigen::Vector2cd::Zero();
        for (int k = 0; k < 3; ++k) grad += e.grad[k].cast<cplx>() * u[tri[k]];
        for (int i = 0; i < 3; ++i) r[tri[i]] += e.area * (grad[0] * e.grad[i].x() + grad[1] * e.grad[i].y());
        for (const auto& q : rule) {
            const double phi[3] = {q.l0, q.l1, q.l2};
            const cplx uq = phi[0] * u[tri[0]] + phi[1] * u[tri[1]] + phi[2] * u[tri[2]];
            cplx a = cellContent(mesh, content, t, uq, false);
            if (content.forcing) {
                const Vec2 x = phi[0] * mesh.nodes[tri[0]] + phi[1] * mesh.nodes[tri[1]] + phi[2] * mesh.nodes[tri[2]];
                a += content.forcing(x);
            }
            a *= q.weight * e.area;
            for (int i = 0; i < 3; ++i) r[tri[i]] -= a * phi[i];
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Solver

VecC boundaryValues(const TriMesh& mesh, const std::function<cplx(const Vec2&)>& f)
{
    const auto nodes = mesh.boundaryNodes();
    VecC out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = f(mesh.nodes[nodes[i]]);
    return out;
}

FemField solveSemilinear(std::shared_ptr<const TriMesh> mesh, const ContentModel& content, const VecC& psi,
                         const NewtonOptions& opt)
{
    if (!mesh) throw SolverError("no mesh");
    content.validate();
    content.checkRegions(*mesh);
    const auto bnodes = mesh->boundaryNodes();
    if (psi.size() != static_cast<Eigen::Index>(bnodes.size()))
        throw SolverError("boundary data length does not match the boundary node count");
    if (!psi.allFinite()) throw SolverError("boundary data is not finite");
    const double psiNorm = boundaryHalfNorm(*mesh, psi);
    if (psiNorm > opt.smallnessDelta) {
        std::ostringstream msg;
        msg << "boundary data norm " << psiNorm << " exceeds the smallness threshold " << opt.smallnessDelta;
        throw SmallnessError(msg.str());
    }

    const int n = static_cast<int>(mesh->nodes.size());
    FemField field;
    field.mesh = mesh;
    field.content = std::make_shared<const ContentModel>(content);
    VecC u = VecC::Zero(n);
    for (std::size_t i = 0; i < bnodes.size(); ++i) u[bnodes[i]] = psi[i];

    auto solveStep = [&](const LinearizedSystem& sys, const VecC& rhsFull) {
        Eigen::SparseLU<SparseC, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(sys.reduced);
        if (lu.info() != Eigen::Success)
            throw SingularSystemError("linearized operator is singular on the interior nodes");
        VecC rhs(sys.interior.size());
        for (std::size_t k = 0; k < sys.interior.size(); ++k) rhs[k] = rhsFull[sys.interior[k]];
        VecC x = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !x.allFinite())
            throw SingularSystemError("linearized solve failed on the interior nodes");
        for (std::size_t k = 0; k < sys.interior.size(); ++k) u[sys.interior[k]] -= x[k];
    };

    // Start: Delta u + a(x,0) + da(x,0) u = 0 with the boundary data.
    {
        const LinearizedSystem sys0 = assembleLinearized(*mesh, content, VecC::Zero(n));
        VecC linearResidual = sys0.full * u;
        if (content.forcing) {
            ContentModel sourceOnly;
            sourceOnly.forcing = content.forcing;
            sourceOnly.layers.resize(content.layers.size());
            linearResidual += weakResidual(*mesh, sourceOnly, VecC::Zero(n));
        }
        if (interiorNorm(linearResidual, sys0.interior) > 0) solveStep(sys0, linearResidual);
    }

    std::vector<int> interior;
    {
        std::vector<char> isBoundary(n, 0);
        for (int b : bnodes) isBoundary[b] = 1;
        for (int i = 0; i < n; ++i)
            if (!isBoundary[i]) interior.push_back(i);
    }
    VecC r = weakResidual(*mesh, content, u);
    double res = interiorNorm(r, interior);
    field.residualHistory.push_back(res);
    int it = 0;
    while (!(res <= opt.tol)) {
        if (it >= opt.maxIter || !std::isfinite(res)) {
            std::ostringstream msg;
            msg << "Newton iteration did not converge: residual " << res << " after " << it << " iterations";
            throw NewtonDivergenceError(msg.str(), field.residualHistory);
        }
        const LinearizedSystem sys = assembleLinearized(*mesh, content, u);
        solveStep(sys, r);
        ++it;
        r = weakResidual(*mesh, content, u);
        res = interiorNorm(r, interior);
        field.residualHistory.push_back(res);
    }
    field.values = std::move(u);
    field.newtonIterations = it;
    return field;
}

CauchyData dirichletToNeumann(const FemField& field)
{
    const TriMesh& mesh = *field.mesh;
    const VecC r = weakResidual(mesh, *field.content, field.values);
    CauchyData cd;
    cd.meshSize = mesh.meshSize;
    cd.nodes = mesh.boundaryNodes();
    const std::size_t nb = cd.nodes.size();
    cd.psi.resize(nb);
    cd.dnu.resize(nb);
    cd.weights = VecC::Zero(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        const auto& prev = mesh.boundaryEdges[(i + nb - 1) % nb];
        const auto& next = mesh.boundaryEdges[i];
        cd.weights[i] = 0.5 * ((mesh.nodes[prev.b] - mesh.nodes[prev.a]).norm() +
                               (mesh.nodes[next.b] - mesh.nodes[next.a]).norm());
        const int node = cd.nodes[i];
        cd.coords.push_back(mesh.nodes[node]);
        cd.psi[i] = field.values[node];
        cd.dnu[i] = r[node] / cd.weights[i];
    }
    return cd;
}

double h1Norm(const TriMesh& mesh, const VecC& u)
{
    const SparseC k = assembleStiffness(mesh);
    const SparseC m = assembleMass(mesh);
    const cplx s = u.dot(k * u) + u.dot(m * u);
    return std::sqrt(std::max(0.0, s.real()));
}

double boundaryL2Norm(const TriMesh& mesh, const VecC& psi)
{
    const std::size_t nb = mesh.boundaryEdges.size();
    if (psi.size() != static_cast<Eigen::Index>(nb)) throw SolverError("boundary data length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        const auto& e = mesh.boundaryEdges[i];
        const double len = (mesh.nodes[e.b] - mesh.nodes[e.a]).norm();
        const cplx a = psi[i], b = psi[(i + 1) % nb];
        s += len / 3.0 * (std::norm(a) + std::norm(b) + (a * std::conj(b)).real());
    }
    return std::sqrt(s);
}

double boundaryHalfNorm(const TriMesh& mesh, const VecC& psi)
{
    const double l2 = boundaryL2Norm(mesh, psi);
    const std::size_t nb = mesh.boundaryEdges.size();
    double semi = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        const auto& e = mesh.boundaryEdges[i];
        const double len = (mesh.nodes[e.b] - mesh.nodes[e.a]).norm();
        semi += std::norm(psi[(i + 1) % nb] - psi[i]) / len;
    }
    return std::sqrt(l2 * l2 + l2 * std::sqrt(semi));
}

SmallDataReport smallDataBound(std::shared_ptr<const TriMesh> mesh, const ContentModel& content, const VecC& psi0,
                               const std::vector<double>& epsList, double factor, const NewtonOptions& opt)
{
    SmallDataReport rep;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double eps : epsList) {
        const VecC psi = eps * psi0;
        const FemField f = solveSemilinear(mesh, content, psi, opt);
        SmallDataRow row;
        row.eps = eps;
        row.uNorm = h1Norm(*mesh, f.values);
        row.psiNorm = boundaryHalfNorm(*mesh, psi);
        row.ratio = row.psiNorm > 0 ? row.uNorm / row.psiNorm : 0.0;
        row.iterations = f.newtonIterations;
        lo = std::min(lo, row.ratio);
        hi = std::max(hi, row.ratio);
        rep.rows.push_back(row);
    }
    rep.spread = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
    rep.pass = !rep.rows.empty() && rep.spread < factor;
    return rep;
}

}  // namespace semilin
