#include "semilin/inverse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_multimin.h>

#include <Eigen/SVD>

#include "semilin/errors.hpp"

namespace semilin {

namespace {

using Residual = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

double seconds(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

double psiNorm(const CauchyData& d)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < d.psi.size(); ++i) s += d.weights[i].real() * std::norm(d.psi[i]);
    return std::sqrt(s);
}

// Weighted Neumann differences of one simulated measurement against data
// already resampled to the same nodes, appended to `out` at `offset`.
void appendResidual(const CauchyData& model, const CauchyData& data, Eigen::VectorXd& out, Eigen::Index offset)
{
    const double norm = psiNorm(model);
    const double scale = norm > 0 ? 1.0 / norm : 1.0;
    for (Eigen::Index i = 0; i < model.dnu.size(); ++i) {
        const cplx d = std::sqrt(model.weights[i].real()) * scale * (model.dnu[i] - data.dnu[i]);
        out[offset + 2 * i] = d.real();
        out[offset + 2 * i + 1] = d.imag();
    }
}

CauchyData solveOn(std::shared_ptr<const TriMesh> mesh, const ContentModel& content, const BoundaryFunction& psi,
                   const NewtonOptions& newton)
{
    const FemField f = solveSemilinear(mesh, content, boundaryValues(*mesh, psi), newton);
    return dirichletToNeumann(f);
}

Eigen::VectorXd residualOn(std::shared_ptr<const TriMesh> mesh, const RecoveryProblem& problem,
                           const ContentModel& content, const NewtonOptions& newton)
{
    const Eigen::Index nb = static_cast<Eigen::Index>(mesh->boundaryEdges.size());
    Eigen::VectorXd r(2 * nb * static_cast<Eigen::Index>(problem.measurements.size()));
    for (std::size_t j = 0; j < problem.measurements.size(); ++j) {
        const auto& m = problem.measurements[j];
        const CauchyData model = solveOn(mesh, content, m.psi, newton);
        const CauchyData data = resampleCauchyData(m.data, *mesh);
        appendResidual(model, data, r, 2 * nb * static_cast<Eigen::Index>(j));
    }
    return r;
}

// Content copy that skips the class rules while an optimizer moves through
// parameter space; the hypothesis is validated once up front.
ContentModel relaxed(ContentModel c)
{
    c.classTag = ContentClass::singleLayer;
    return c;
}

struct LeastSquaresResult {
    Eigen::VectorXd x;
    double cost = 0.0;  // residual norm
    int iterations = 0;
    Eigen::MatrixXd jacobian;
};

struct CallbackState {
    const Residual* f;
    std::exception_ptr error;
};

int gslResidual(const gsl_vector* x, void* params, gsl_vector* out)
{
    auto* st = static_cast<CallbackState*>(params);
    try {
        const Eigen::VectorXd r = (*st->f)(Eigen::Map<const Eigen::VectorXd>(x->data, x->size));
        for (Eigen::Index i = 0; i < r.size(); ++i) gsl_vector_set(out, i, r[i]);
        return GSL_SUCCESS;
    } catch (const SolverError&) {
        // A trial point where the forward solve fails is rejected by the trust region.
        for (std::size_t i = 0; i < out->size; ++i) gsl_vector_set(out, i, 1e3);
        return GSL_SUCCESS;
    } catch (const GeometryError&) {
        for (std::size_t i = 0; i < out->size; ++i) gsl_vector_set(out, i, 1e3);
        return GSL_SUCCESS;
    } catch (...) {
        st->error = std::current_exception();
        return GSL_EBADFUNC;
    }
}

// Trust-region Levenberg-Marquardt with a forward-difference Jacobian.
LeastSquaresResult leastSquares(const Residual& f, const Eigen::VectorXd& x0, int maxIter, double fdStep)
{
    gsl_set_error_handler_off();
    const Eigen::VectorXd r0 = f(x0);
    const std::size_t n = static_cast<std::size_t>(r0.size()), p = static_cast<std::size_t>(x0.size());
    if (n < p) throw RecoveryError("fewer residuals than unknowns");
    CallbackState st{&f, nullptr};
    gsl_multifit_nlinear_fdf fdf;
    fdf.f = gslResidual;
    fdf.df = nullptr;
    fdf.fvv = nullptr;
    fdf.n = n;
    fdf.p = p;
    fdf.params = &st;
    gsl_multifit_nlinear_parameters params = gsl_multifit_nlinear_default_parameters();
    params.h_df = fdStep;
    gsl_multifit_nlinear_workspace* w = gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, n, p);
    gsl_vector* x = gsl_vector_alloc(p);
    for (std::size_t i = 0; i < p; ++i) gsl_vector_set(x, i, x0[static_cast<Eigen::Index>(i)]);
    int info = 0;
    gsl_multifit_nlinear_init(x, &fdf, w);
    gsl_multifit_nlinear_driver(static_cast<std::size_t>(maxIter), 1e-10, 1e-14, 0.0, nullptr, nullptr, &info, w);
    LeastSquaresResult res;
    res.x.resize(static_cast<Eigen::Index>(p));
    const gsl_vector* xs = gsl_multifit_nlinear_position(w);
    for (std::size_t i = 0; i < p; ++i) res.x[static_cast<Eigen::Index>(i)] = gsl_vector_get(xs, i);
    const gsl_vector* rs = gsl_multifit_nlinear_residual(w);
    res.cost = gsl_blas_dnrm2(rs);
    const gsl_matrix* j = gsl_multifit_nlinear_jac(w);
    res.jacobian.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < p; ++b)
            res.jacobian(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = gsl_matrix_get(j, a, b);
    res.iterations = static_cast<int>(gsl_multifit_nlinear_niter(w));
    gsl_vector_free(x);
    gsl_multifit_nlinear_free(w);
    if (st.error) std::rethrow_exception(st.error);
    return res;
}

struct SimplexState {
    const std::function<double(const Eigen::VectorXd&)>* f;
    std::exception_ptr error;
    int evaluations = 0;
};

double gslObjective(const gsl_vector* x, void* params)
{
    auto* st = static_cast<SimplexState*>(params);
    ++st->evaluations;
    try {
        return (*st->f)(Eigen::Map<const Eigen::VectorXd>(x->data, x->size));
    } catch (const SolverError&) {
        return 1e3;
    } catch (const GeometryError&) {
        return 1e3;
    } catch (...) {
        st->error = std::current_exception();
        return GSL_NAN;
    }
}

struct SimplexResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
    std::vector<double> history;
};

SimplexResult nelderMead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                         double step, double sizeTol, int maxEvaluations)
{
    gsl_set_error_handler_off();
    const std::size_t p = static_cast<std::size_t>(x0.size());
    SimplexState st{&f, nullptr};
    gsl_multimin_function fn{gslObjective, p, &st};
    gsl_vector* x = gsl_vector_alloc(p);
    gsl_vector* ss = gsl_vector_alloc(p);
    for (std::size_t i = 0; i < p; ++i) gsl_vector_set(x, i, x0[static_cast<Eigen::Index>(i)]);
    gsl_vector_set_all(ss, step);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, p);
    gsl_multimin_fminimizer_set(s, &fn, x, ss);
    SimplexResult res;
    while (st.evaluations < maxEvaluations && !st.error) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        res.history.push_back(s->fval);
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), sizeTol) == GSL_SUCCESS) break;
    }
    res.x.resize(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) res.x[static_cast<Eigen::Index>(i)] = gsl_vector_get(s->x, i);
    res.value = s->fval;
    res.evaluations = st.evaluations;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(x);
    gsl_vector_free(ss);
    if (st.error) std::rethrow_exception(st.error);
    return res;
}

Eigen::VectorXd flatten(const ConvexPolygon& p)
{
    Eigen::VectorXd x(2 * static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) x.segment<2>(2 * static_cast<Eigen::Index>(i)) = p.vertex(i);
    return x;
}

std::vector<Vec2> unflatten(const Eigen::VectorXd& x)
{
    std::vector<Vec2> pts;
    for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) pts.emplace_back(x[i], x[i + 1]);
    return pts;
}

double repairDistance(const std::vector<Vec2>& pts, const ConvexPolygon& poly)
{
    // Sum of squared distances from each point to the nearest repaired vertex.
    double s = 0.0;
    for (const Vec2& p : pts) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec2& v : poly.vertices()) best = std::min(best, (p - v).squaredNorm());
        s += best;
    }
    return s;
}

// Penalty entries tying raw optimizer coordinates to their repaired polygon.
Eigen::VectorXd repairResidual(const std::vector<Vec2>& pts, const ConvexPolygon& poly, double weight)
{
    Eigen::VectorXd r(2 * static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2* best = &poly.vertices().front();
        for (const Vec2& v : poly.vertices())
            if ((pts[i] - v).squaredNorm() < (pts[i] - *best).squaredNorm()) best = &v;
        r.segment<2>(2 * static_cast<Eigen::Index>(i)) = weight * (pts[i] - *best);
    }
    return r;
}

const ConvexPolygon& containerOf(const RecoveryProblem& problem, const std::vector<ConvexPolygon>& nest, std::size_t l)
{
    return l == 0 ? problem.domain : nest[l - 1];
}

int distinctMeasurements(const RecoveryProblem& problem, const TriMesh& mesh)
{
    std::vector<VecC> traces;
    for (const auto& m : problem.measurements) {
        const VecC t = boundaryValues(mesh, m.psi);
        bool seen = false;
        for (const auto& u : traces)
            if ((u - t).norm() <= 1e-12 * std::max(u.norm(), t.norm())) seen = true;
        if (!seen) traces.push_back(t);
    }
    return static_cast<int>(traces.size());
}

cplx& slotRef(ContentModel& c, const CoefficientSlot& s)
{
    if (s.layer < 1 || s.power < 1) throw ConfigError("coefficient slots start at layer 1 and power 1");
    if (c.layers.size() < static_cast<std::size_t>(s.layer)) c.layers.resize(static_cast<std::size_t>(s.layer));
    auto& v = c.layers[static_cast<std::size_t>(s.layer - 1)];
    if (v.size() < static_cast<std::size_t>(s.power)) v.resize(static_cast<std::size_t>(s.power), 0.0);
    return v[static_cast<std::size_t>(s.power - 1)];
}

// Pulls the polygons that are not free inside a predecessor that moved over them.
void clampFixed(std::vector<ConvexPolygon>& nest, const std::vector<std::size_t>& free, double margin)
{
    for (std::size_t l = 1; l < nest.size(); ++l) {
        if (std::find(free.begin(), free.end(), l) != free.end()) continue;
        const ConvexPolygon& outer = nest[l - 1];
        const auto& v = nest[l].vertices();
        if (std::any_of(v.begin(), v.end(), [&](const Vec2& q) { return outer.insideDistance(q) < margin; }))
            nest[l] = repairConvexity(v, outer, margin);
    }
}

// Nest polygons and slots packed into one parameter vector. A polygon is
// either free (2V vertex coordinates) or a similarity image of its reference
// (centroid shift, log scale, rotation).
struct NestParameters {
    std::vector<std::size_t> polygons;  // indices of the free polygons
    std::vector<CoefficientSlot> slots;
    bool complexCoefficients = false;
    bool similarity = false;
    double margin = 0.0;
    std::vector<ConvexPolygon> reference;  // per free polygon, set by bind()

    void bind(const std::vector<ConvexPolygon>& nest)
    {
        reference.clear();
        for (std::size_t l : polygons) reference.push_back(nest[l]);
    }

    Eigen::VectorXd pack(const std::vector<ConvexPolygon>& nest, const ContentModel& c) const
    {
        std::vector<double> v;
        for (std::size_t i = 0; i < polygons.size(); ++i) {
            const ConvexPolygon& p = nest[polygons[i]];
            if (similarity) {
                const Vec2 shift = p.centroid() - reference[i].centroid();
                const double ls = 0.5 * std::log(p.area() / reference[i].area());
                v.insert(v.end(), {shift.x(), shift.y(), ls, 0.0});
            } else {
                for (const Vec2& q : p.vertices()) v.insert(v.end(), {q.x(), q.y()});
            }
        }
        ContentModel copy = c;
        for (const auto& s : slots) {
            const cplx z = slotRef(copy, s);
            v.push_back(z.real());
            if (complexCoefficients) v.push_back(z.imag());
        }
        return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    // Unpacks into nest/content; returns the raw vertex lists for the penalty.
    std::vector<std::vector<Vec2>> unpack(const Eigen::VectorXd& x, const RecoveryProblem& problem,
                                          std::vector<ConvexPolygon>& nest, ContentModel& c) const
    {
        std::vector<std::vector<Vec2>> raw;
        Eigen::Index k = 0;
        for (std::size_t i = 0; i < polygons.size(); ++i) {
            const std::size_t l = polygons[i];
            std::vector<Vec2> pts;
            if (similarity) {
                const ConvexPolygon& ref = reference[i];
                const Vec2 rc = ref.centroid();
                const double s = std::exp(x[k + 2]), th = x[k + 3];
                Eigen::Matrix2d rot;
                rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
                for (const Vec2& q : ref.vertices()) pts.push_back(rc + Vec2(x[k], x[k + 1]) + s * rot * (q - rc));
                k += 4;
            } else {
                for (std::size_t j = 0; j < nest[l].size(); ++j, k += 2) pts.emplace_back(x[k], x[k + 1]);
            }
            nest[l] = repairConvexity(pts, containerOf(problem, nest, l), margin);
            raw.push_back(std::move(pts));
        }
        clampFixed(nest, polygons, margin);
        for (const auto& s : slots) {
            const double re = x[k++];
            const double im = complexCoefficients ? x[k++] : slotRef(c, s).imag();
            slotRef(c, s) = cplx(re, im);
        }
        return raw;
    }
};

// Joint least squares over free polygons and slots with the cut-cell model.
double refineJointly(const CutCellSimulator& sim, const RecoveryProblem& problem, NestParameters np,
                     std::vector<ConvexPolygon>& nest, ContentModel& content, int maxIter, double fdStep)
{
    np.bind(nest);
    const double penalty = 10.0;
    const Residual f = [&](const Eigen::VectorXd& x) {
        std::vector<ConvexPolygon> trial = nest;
        ContentModel c = content;
        const auto raw = np.unpack(x, problem, trial, c);
        const Eigen::VectorXd data = sim.residual(problem, trial, c);
        Eigen::Index extra = 0;
        for (const auto& pts : raw) extra += 2 * static_cast<Eigen::Index>(pts.size());
        Eigen::VectorXd r(data.size() + extra);
        r.head(data.size()) = data;
        Eigen::Index k = data.size();
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const Eigen::VectorXd pr = repairResidual(raw[i], trial[np.polygons[i]], penalty);
            r.segment(k, pr.size()) = pr;
            k += pr.size();
        }
        return r;
    };
    if (np.polygons.empty()) throw RecoveryError("joint refinement needs at least one free polygon");
    const LeastSquaresResult res = leastSquares(f, np.pack(nest, content), maxIter, fdStep);
    np.unpack(res.x, problem, nest, content);
    return sim.misfit(problem, nest, content);
}

// Nelder-Mead over polygon l of the nest with everything else fixed.
ShapeRecoveryResult fitPolygon(const CutCellSimulator& sim, const RecoveryProblem& problem,
                               std::vector<ConvexPolygon> nest, std::size_t l, const ContentModel& content,
                               const ShapeRecoveryOptions& opt, double margin)
{
    const ConvexPolygon& container = containerOf(problem, nest, l);
    const std::function<double(const Eigen::VectorXd&)> objective = [&](const Eigen::VectorXd& x) {
        const std::vector<Vec2> pts = unflatten(x);
        std::vector<ConvexPolygon> trial = nest;
        trial[l] = repairConvexity(pts, container, margin);
        clampFixed(trial, {l}, margin);
        return sim.misfit(problem, trial, content) + repairDistance(pts, trial[l]);
    };
    ShapeRecoveryResult res;
    Eigen::VectorXd x = flatten(nest[l]);
    double best = sim.misfit(problem, nest, content);
    res.history.push_back(best);
    res.evaluations = 1;
    if (best > 1e-14) {
        double step = opt.initialStep;
        for (int run = 0; run <= opt.restarts && res.evaluations < opt.maxEvaluations; ++run) {
            const SimplexResult s = nelderMead(objective, x, step, opt.sizeTol, opt.maxEvaluations - res.evaluations);
            res.evaluations += s.evaluations;
            res.history.insert(res.history.end(), s.history.begin(), s.history.end());
            if (s.value < best) {
                best = s.value;
                x = s.x;
            }
            step *= 0.25;
        }
    }
    res.shape = repairConvexity(unflatten(x), container, margin);
    nest[l] = res.shape;
    clampFixed(nest, {l}, margin);
    res.misfit = sim.misfit(problem, nest, content);
    return res;
}

}  // namespace

void RecoveryProblem::validate() const
{
    if (measurements.empty()) throw ConfigError("a recovery problem needs at least one measurement");
    if (!(hMesh > 0)) throw ConfigError("inversion mesh size must be positive");
    for (const auto& m : measurements) {
        if (!m.psi) throw ConfigError("measurement '" + m.label + "' has no Dirichlet data");
        m.data.validate();
    }
}

double cauchyGap(const CauchyData& a, const CauchyData& b)
{
    a.validate();
    b.validate();
    if (a.coords.size() != b.coords.size()) throw SolverError("Cauchy data use different boundary discretizations");
    for (std::size_t i = 0; i < a.coords.size(); ++i)
        if ((a.coords[i] - b.coords[i]).norm() > 1e-9 * (1.0 + a.coords[i].norm()))
            throw SolverError("Cauchy data use different boundary nodes");
    const double norm = psiNorm(a);
    double dpsi = 0.0, dn = 0.0;
    for (Eigen::Index i = 0; i < a.psi.size(); ++i) {
        dpsi += a.weights[i].real() * std::norm(a.psi[i] - b.psi[i]);
        dn += a.weights[i].real() * std::norm(a.dnu[i] - b.dnu[i]);
    }
    if (std::sqrt(dpsi) > 1e-9 * norm + 1e-300) throw SolverError("Cauchy data have different Dirichlet traces");
    return norm > 0 ? std::sqrt(dn) / norm : std::sqrt(dn);
}

CauchyData resampleCauchyData(const CauchyData& source, const TriMesh& target)
{
    source.validate();
    const std::size_t ns = source.coords.size();
    if (ns < 3) throw SolverError("source boundary has fewer than three nodes");
    double diam = 0.0;
    for (const Vec2& p : source.coords) diam = std::max(diam, (p - source.coords.front()).norm());
    CauchyData out;
    out.meshSize = target.meshSize;
    out.nodes = target.boundaryNodes();
    const std::size_t nb = out.nodes.size();
    out.psi.resize(static_cast<Eigen::Index>(nb));
    out.dnu.resize(static_cast<Eigen::Index>(nb));
    out.weights.resize(static_cast<Eigen::Index>(nb));
    for (std::size_t i = 0; i < nb; ++i) {
        const Vec2 p = target.nodes[out.nodes[i]];
        std::size_t best = 0;
        double bestD = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < ns; ++k) {
            const double d = segmentDistance(p, source.coords[k], source.coords[(k + 1) % ns]);
            if (d < bestD) {
                bestD = d;
                best = k;
            }
        }
        if (bestD > 1e-8 * diam) throw SolverError("target boundary node is off the source boundary");
        const Vec2 a = source.coords[best], b = source.coords[(best + 1) % ns];
        const double t = std::clamp((p - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
        const auto ia = static_cast<Eigen::Index>(best), ib = static_cast<Eigen::Index>((best + 1) % ns);
        out.coords.push_back(p);
        out.psi[static_cast<Eigen::Index>(i)] = (1 - t) * source.psi[ia] + t * source.psi[ib];
        out.dnu[static_cast<Eigen::Index>(i)] = (1 - t) * source.dnu[ia] + t * source.dnu[ib];
        const auto& prev = target.boundaryEdges[(i + nb - 1) % nb];
        const auto& next = target.boundaryEdges[i];
        out.weights[static_cast<Eigen::Index>(i)] = 0.5 * ((target.nodes[prev.b] - target.nodes[prev.a]).norm() +
                                                           (target.nodes[next.b] - target.nodes[next.a]).norm());
    }
    return out;
}

CauchyData synthesizeCauchyData(const ConvexPolygon& domain, const std::vector<ConvexPolygon>& nest,
                                const ContentModel& content, const BoundaryFunction& psi, double hMesh,
                                const NewtonOptions& newton)
{
    auto mesh = std::make_shared<const TriMesh>(triangulate(domain, nest, hMesh));
    return solveOn(mesh, content, psi, newton);
}

CutCellSimulator::CutCellSimulator(const ConvexPolygon& domain, double hMesh, NewtonOptions newton)
    : base_(std::make_shared<const TriMesh>(triangulate(domain, {}, hMesh))), newton_(newton)
{
}

CauchyData CutCellSimulator::simulate(const std::vector<ConvexPolygon>& nest, const ContentModel& content,
                                      const BoundaryFunction& psi) const
{
    auto mesh = nest.empty() ? base_ : std::make_shared<const TriMesh>(embedNest(*base_, nest));
    return solveOn(mesh, content, psi, newton_);
}

Eigen::VectorXd CutCellSimulator::residual(const RecoveryProblem& problem, const std::vector<ConvexPolygon>& nest,
                                           const ContentModel& content) const
{
    auto mesh = nest.empty() ? base_ : std::make_shared<const TriMesh>(embedNest(*base_, nest));
    return residualOn(mesh, problem, content, newton_);
}

double CutCellSimulator::misfit(const RecoveryProblem& problem, const std::vector<ConvexPolygon>& nest,
                                const ContentModel& content) const
{
    return residual(problem, nest, content).norm();
}

ConvexPolygon repairConvexity(const std::vector<Vec2>& points, const ConvexPolygon& container, double margin)
{
    const std::size_t n = points.size();
    if (n < 3) throw GeometryError("a polygon needs at least three vertices");
    const Vec2 cc = container.centroid();
    if (container.insideDistance(cc) <= margin) throw GeometryError("container too small for the margin");
    std::vector<Vec2> pts;
    for (Vec2 p : points) {
        if (!std::isfinite(p.x()) || !std::isfinite(p.y())) throw GeometryError("non-finite vertex");
        if (container.insideDistance(p) < margin) {
            double lo = 0.0, hi = 1.0;  // fraction of the way from cc to p
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (container.insideDistance(cc + mid * (p - cc)) >= margin ? lo : hi) = mid;
            }
            p = cc + lo * (p - cc);
        }
        pts.push_back(p);
    }
    Vec2 c = Vec2::Zero();
    for (const Vec2& p : pts) c += p;
    c /= static_cast<double>(n);
    std::vector<double> ang(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
        ang[i] = std::atan2(pts[i].y() - c.y(), pts[i].x() - c.x());
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ang[a] < ang[b]; });
    std::vector<Vec2> ring;
    for (std::size_t i : order) ring.push_back(pts[i]);

    // Mark hull vertices: repeatedly drop vertices with a non-positive turn.
    std::vector<bool> keep(n, true);
    const double scale = std::max(1e-12, (ring[0] - c).norm());
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (keep[i]) idx.push_back(i);
        if (idx.size() < 3) break;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const Vec2& a = ring[idx[(k + idx.size() - 1) % idx.size()]];
            const Vec2& b = ring[idx[k]];
            const Vec2& d = ring[idx[(k + 1) % idx.size()]];
            const double cross = (b - a).x() * (d - b).y() - (b - a).y() * (d - b).x();
            if (cross <= 1e-10 * scale * scale) {
                keep[idx[k]] = false;
                changed = true;
                break;
            }
        }
    }
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i]) hull.push_back(i);
    if (hull.size() < 3) {
        // Degenerate: fall back to a small regular polygon around the centroid.
        std::vector<Vec2> reg;
        const double r = std::max(scale, margin);
        for (std::size_t i = 0; i < n; ++i) reg.push_back(c + r * Vec2(std::cos(2 * kPi * i / n), std::sin(2 * kPi * i / n)));
        return ConvexPolygon(reg);
    }
    if (hull.size() == n) return ConvexPolygon(ring);
    // Dropped vertices between hull vertices h0 and h1 go onto an outward arc
    // over the edge h0-h1, which keeps the polygon strictly convex.
    std::vector<Vec2> out;
    for (std::size_t k = 0; k < hull.size(); ++k) {
        const std::size_t h0 = hull[k], h1 = hull[(k + 1) % hull.size()];
        out.push_back(ring[h0]);
        const std::size_t m = (h1 + n - h0) % n - 1;
        if (m == 0) continue;
        const Vec2 a = ring[h0], b = ring[h1];
        const Vec2 e = b - a;
        const Vec2 nrm = Vec2(e.y(), -e.x()).normalized();
        for (std::size_t j = 1; j <= m; ++j) {
            const double t = double(j) / double(m + 1);
            out.push_back(a + t * e + 0.02 * e.norm() * 4 * t * (1 - t) * nrm);
        }
    }
    return ConvexPolygon(out);
}

ShapeRecoveryResult recoverConvexPolygon(const RecoveryProblem& problem, const ConvexPolygon& initial,
                                         const ContentModel& content, const ShapeRecoveryOptions& opt)
{
    problem.validate();
    content.validate();
    const CutCellSimulator sim(problem.domain, problem.hMesh, problem.newton);
    const double margin = 0.5 * problem.hMesh;
    ShapeRecoveryResult res = fitPolygon(sim, problem, {initial}, 0, relaxed(content), opt, margin);

    // Sensitivity: largest misfit change when one coordinate moves by hMesh.
    const Eigen::VectorXd x = flatten(res.shape);
    for (Eigen::Index i = 0; i < x.size(); ++i)
        for (double s : {-1.0, 1.0}) {
            Eigen::VectorXd y = x;
            y[i] += s * problem.hMesh;
            try {
                const ConvexPolygon p = repairConvexity(unflatten(y), problem.domain, margin);
                res.sensitivity =
                    std::max(res.sensitivity, std::abs(sim.misfit(problem, {p}, relaxed(content)) - res.misfit));
            } catch (const GeometryError&) {
            }
        }
    res.flatLandscape = res.sensitivity < opt.flatTol;
    std::ostringstream diag;
    diag << "evaluations " << res.evaluations << ", misfit " << res.misfit << ", sensitivity " << res.sensitivity;
    if (res.flatLandscape)
        diag << "; flat misfit landscape: the data do not see the inclusion (check Assumption A at its vertices)";
    res.diagnostics = diag.str();
    if (res.misfit > opt.misfitTol && !res.flatLandscape)
        throw RecoveryError("shape search stagnated: " + res.diagnostics);
    return res;
}

VandermondeSolution recoverCoefficients(const std::vector<cplx>& apexValues, const std::vector<cplx>& gapValues)
{
    const std::size_t n = apexValues.size();
    if (n == 0 || gapValues.size() != n) throw ConfigError("need one gap value per apex value");
    double scale = 0.0;
    for (const cplx& u : apexValues) scale = std::max(scale, std::abs(u));
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(apexValues[i]) <= 1e-300 || std::abs(apexValues[i]) <= 1e-14 * scale)
            throw SingularSystemError("apex value u_" + std::to_string(i + 1) + " is zero");
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(apexValues[j] - apexValues[i]) <= 1e-12 * scale)
                throw SingularSystemError("distinctness factor u_" + std::to_string(j + 1) + " - u_" +
                                          std::to_string(i + 1) + " vanishes");
    }
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXcd a(N, N);
    Eigen::VectorXcd g(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        cplx p = 1.0;
        for (Eigen::Index j = 0; j < N; ++j) a(i, j) = (p *= apexValues[static_cast<std::size_t>(i)]);
        g[i] = gapValues[static_cast<std::size_t>(i)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    VandermondeSolution sol;
    sol.conditionNumber = s[N - 1] > 0 ? s[0] / s[N - 1] : std::numeric_limits<double>::infinity();
    const Eigen::VectorXcd c = a.fullPivLu().solve(g);
    sol.coefficients.assign(c.data(), c.data() + N);
    return sol;
}

std::vector<cplx> forwardVandermonde(const std::vector<cplx>& apexValues, const std::vector<cplx>& coefficients)
{
    std::vector<cplx> g;
    for (const cplx& u : apexValues) {
        cplx s = 0.0, p = 1.0;
        for (const cplx& c : coefficients) s += c * (p *= u);
        g.push_back(s);
    }
    return g;
}

CoefficientFit recoverCoefficientsFromBoundary(const RecoveryProblem& problem, const std::vector<ConvexPolygon>& nest,
                                               const ContentModel& initial, const std::vector<CoefficientSlot>& slots,
                                               const CoefficientFitOptions& opt)
{
    problem.validate();
    initial.validate();
    if (slots.empty()) throw ConfigError("no coefficient slots to recover");
    auto mesh = std::make_shared<const TriMesh>(triangulate(problem.domain, nest, problem.hMesh));
    NestParameters np;
    np.slots = slots;
    np.complexCoefficients = opt.complexCoefficients;
    const ContentModel start = relaxed(initial);
    std::vector<ConvexPolygon> fixed = nest;
    const Residual f = [&](const Eigen::VectorXd& x) {
        ContentModel c = start;
        np.unpack(x, problem, fixed, c);
        return residualOn(mesh, problem, c, problem.newton);
    };
    const LeastSquaresResult ls = leastSquares(f, np.pack(nest, start), opt.maxIterations, opt.fdStep);
    CoefficientFit fit;
    fit.content = start;
    np.unpack(ls.x, problem, fixed, fit.content);
    fit.content.classTag = initial.classTag;
    for (const auto& s : slots) fit.coefficients.push_back(slotRef(fit.content, s));
    fit.misfit = ls.cost;
    fit.iterations = ls.iterations;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ls.jacobian);
    const auto& sv = svd.singularValues();
    fit.jacobianCondition = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
    const int distinct = distinctMeasurements(problem, *mesh);
    const bool fewMeasurements = distinct < static_cast<int>(slots.size());
    fit.rankDeficient = fewMeasurements || !(sv[sv.size() - 1] > opt.rankTol * sv[0]);
    std::ostringstream diag;
    diag << "iterations " << fit.iterations << ", misfit " << fit.misfit << ", Jacobian condition "
         << fit.jacobianCondition;
    if (fewMeasurements)
        diag << "; rank deficient: " << distinct << " distinct measurements for " << slots.size() << " coefficients";
    else if (fit.rankDeficient)
        diag << "; rank deficient Jacobian";
    fit.diagnostics = diag.str();
    return fit;
}

NestRecoveryResult recoverNest(const RecoveryProblem& problem, const NestHypothesis& hypothesis,
                               const NestRecoveryOptions& opt)
{
    problem.validate();
    const std::size_t nLayers = hypothesis.initialLayers.size();
    if (nLayers == 0) throw ConfigError("nest hypothesis has no layers");
    {
        ContentModel check = hypothesis.initialContent;
        check.classTag = hypothesis.contentClass;
        check.validate();
        NestReport rep = validateNest(NestedPartition{hypothesis.initialLayers});
        if (!rep.pass) throw ConfigError("initial nest is not strictly nested");
    }
    const CutCellSimulator sim(problem.domain, problem.hMesh, problem.newton);
    const double margin = 0.25 * problem.hMesh;
    std::vector<ConvexPolygon> layers = hypothesis.initialLayers;
    ContentModel content = relaxed(hypothesis.initialContent);
    if (content.layers.size() < nLayers) content.layers.resize(nLayers, {0.0});
    NestRecoveryResult res;

    auto describe = [&](std::size_t done) {
        std::ostringstream os;
        os << "completed layers: " << done;
        for (std::size_t l = 0; l < done; ++l) {
            os << " [";
            for (const Vec2& v : layers[l].vertices()) os << '(' << v.x() << ',' << v.y() << ')';
            os << ']';
        }
        return os.str();
    };

    // Peeling: layer l is fitted with the outer layers frozen and the deeper
    // layers held at their current estimates.
    for (std::size_t l = 0; l < nLayers; ++l) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (!opt.similarityShapes) layers[l] = fitPolygon(sim, problem, layers, l, content, opt.shape, margin).shape;
            NestParameters np;
            np.polygons = {l};
            np.margin = margin;
            np.similarity = opt.similarityShapes;
            np.complexCoefficients = opt.coefficients.complexCoefficients;
            for (const auto& s : hypothesis.slots)
                if (static_cast<std::size_t>(s.layer) == l + 1) np.slots.push_back(s);
            const double m =
                refineJointly(sim, problem, np, layers, content, opt.refinementIterations, opt.coefficients.fdStep);
            res.stages.push_back({"layer " + std::to_string(l + 1), m, seconds(t0)});
        } catch (const Error& e) {
            throw RecoveryError(std::string("nest recovery failed at layer ") + std::to_string(l + 1) + ": " +
                                e.what() + "; " + describe(l));
        }
    }
    const auto t0 = std::chrono::steady_clock::now();
    NestParameters all;
    for (std::size_t l = 0; l < nLayers; ++l) all.polygons.push_back(l);
    all.slots = hypothesis.slots;
    all.margin = margin;
    all.similarity = opt.similarityShapes;
    all.complexCoefficients = opt.coefficients.complexCoefficients;
    try {
        res.misfit = refineJointly(sim, problem, all, layers, content, opt.refinementIterations, opt.coefficients.fdStep);
    } catch (const Error& e) {
        throw RecoveryError(std::string("joint nest refinement failed: ") + e.what() + "; " + describe(nLayers));
    }
    res.stages.push_back({"joint refinement", res.misfit, seconds(t0)});
    res.layers = layers;
    res.content = content;
    res.content.classTag = hypothesis.contentClass;
    if (res.misfit > opt.misfitTol) {
        std::ostringstream os;
        os << "nest recovery stagnated at misfit " << res.misfit << "; " << describe(nLayers);
        throw RecoveryError(os.str());
    }
    return res;
}

}  // namespace semilin
