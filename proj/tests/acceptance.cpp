// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 when any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "semilin/admissibility.hpp"
#include "semilin/errors.hpp"
#include "semilin/forward.hpp"
#include "semilin/indicator.hpp"
#include "semilin/inverse.hpp"
#include "semilin/mesh.hpp"
#include "semilin/probes.hpp"

using namespace semilin;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        pass = pass && ok;
        if (detail.tellp() > 0) detail << "; ";
        detail << what << (ok ? "" : " [violated]");
    }
};

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

const ConvexPolygon kSquare = ConvexPolygon::rectangle(0, 0, 1, 1);
const ConvexPolygon kTriangle({Vec2(0.3, 0.3), Vec2(0.7, 0.35), Vec2(0.45, 0.7)});

BoundaryFunction planeWave(cplx amplitude, double k, Vec2 d)
{
    d.normalize();
    return [amplitude, k, d](const Vec2& x) { return amplitude * std::exp(cplx(0.0, k * d.dot(x))); };
}

ContentModel triangleContent()
{
    ContentModel c;
    c.backgroundLambda = 4.0;
    c.layers = {{-30.0, 2.0}};
    return c;
}

double relErr(cplx got, cplx want) { return std::abs(got - want) / std::abs(want); }

// 1. Plain sector integral: tau^-2 decay and the closed form.
void sectorDecay(Verdict& v)
{
    const auto t0 = std::chrono::steady_clock::now();
    const double half = oracle::pi / 4;
    const TruncatedCorner c = TruncatedCorner::sector(Vec2(0, 0), Vec2(1, 0), half, 1.0);
    const auto taus = oracle::logGrid(20, 200, 10);
    std::vector<double> mags;
    double worstClosed = 0.0;
    for (double tau : taus) {
        const CgoProbe p = CgoProbe::forCorner(c, tau);
        mags.push_back(std::abs(cornerIntegral(p, IntegralMethod::quadrature, 1e-10).value));
        // Adaptive quadrature on a corner long enough that the truncation is below 1e-20.
        const TruncatedCorner far = TruncatedCorner::sector(Vec2(0, 0), Vec2(1, 0), half, 46.0 / (std::cos(half) * tau));
        const cplx quad = cornerIntegral(CgoProbe::forCorner(far, tau), IntegralMethod::quadrature, 1e-13).value;
        const cplx closed = infiniteSectorIntegral(p);
        const double beta = std::atan2(p.direction.d.y(), p.direction.d.x());
        const cplx indep = oracle::infiniteSector(tau, beta, -half, half);
        worstClosed = std::max({worstClosed, relErr(closed, quad), relErr(indep, quad)});
    }
    const double slope = oracle::logSlope(taus, mags);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(std::abs(slope + 2.0) <= 0.05, "slope " + fmt(slope) + " vs -2 +- 0.05");
    v.require(worstClosed <= 1e-8, "closed form vs quadrature " + fmt(worstClosed) + " <= 1e-8");
    v.require(secs < 5.0, "runtime " + fmt(secs) + " s < 5 s");
}

// 2. Circular cone: tau^-3 decay and the leading constant.
void coneDecay(Verdict& v)
{
    const auto t0 = std::chrono::steady_clock::now();
    const double half = oracle::pi / 6;
    const TruncatedCorner c = TruncatedCorner::circularCone(Vec3::Zero(), Vec3::UnitX(), half, 1.0);
    const auto taus = oracle::logGrid(20, 200, 10);
    std::vector<double> mags;
    for (double tau : taus) mags.push_back(std::abs(cornerIntegral(CgoProbe::forCorner(c, tau), IntegralMethod::quadrature, 1e-8).value));
    const double slope = oracle::logSlope(taus, mags);
    const double ref = std::tgamma(3.0) * 2.0 * oracle::pi * (1.0 - std::cos(half));
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = taus.size() / 2; i < taus.size(); ++i) {
        const double r = mags[i] * std::pow(taus[i], 3) / ref;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(std::abs(slope + 3.0) <= 0.1, "slope " + fmt(slope) + " vs -3 +- 0.1");
    v.require(lo >= 0.5 && hi <= 2.0, "leading ratio in [" + fmt(lo) + ", " + fmt(hi) + "] within [0.5, 2]");
    v.require(secs < 60.0, "runtime " + fmt(secs) + " s < 60 s");
}

// 3. Weighted integrals: tau^-(alpha+2).
void weightedDecay(Verdict& v)
{
    const TruncatedCorner c = TruncatedCorner::sector(Vec2(0, 0), Vec2(1, 0), oracle::pi / 4, 1.0);
    const auto taus = oracle::logGrid(20, 200, 10);
    for (double alpha : {0.5, 1.0}) {
        std::vector<double> mags;
        for (double tau : taus) mags.push_back(std::abs(weightedCornerIntegral(CgoProbe::forCorner(c, tau), alpha).value));
        const double slope = oracle::logSlope(taus, mags);
        v.require(std::abs(slope + alpha + 2.0) <= 0.05,
                  "alpha " + fmt(alpha) + ": slope " + fmt(slope) + " vs " + fmt(-alpha - 2));
    }
}

// 4. Lid norms: exponential rate zeta h and the explicit bounds.
void lidNorms(Verdict& v)
{
    const double half = oracle::pi / 4, h = 1.0;
    const TruncatedCorner c = TruncatedCorner::sector(Vec2(0, 0), Vec2(1, 0), half, h);
    const double zh = std::cos(half) * h;
    const double lidMeasure = 2.0 * half * h;
    const auto taus = oracle::logGrid(20, 200, 10);
    std::vector<double> l2, h1, dn;
    bool bounded = true;
    for (double tau : taus) {
        const LidNorms n = lidNormEstimates(CgoProbe::forCorner(c, tau));
        const double e = std::sqrt(lidMeasure) * std::exp(-zh * tau);
        bounded = bounded && n.l2 <= e && n.h1 <= std::sqrt(2 * tau * tau + 1) * e && n.dnu <= std::sqrt(2.0) * tau * e;
        l2.push_back(std::log(n.l2));
        h1.push_back(std::log(n.h1));
        dn.push_back(std::log(n.dnu));
    }
    for (auto [name, ys] : {std::pair<const char*, std::vector<double>*>{"L2", &l2}, {"H1", &h1}, {"dnu", &dn}}) {
        const double rate = -oracle::slope(taus, *ys);
        v.require(std::abs(rate / zh - 1.0) <= 0.05, std::string(name) + " rate " + fmt(rate) + " vs zeta h " + fmt(zh));
    }
    v.require(bounded, "norms below the explicit bounds");
}

// 5. Green identity on manufactured pairs.
void greenIdentity(Verdict& v)
{
    const TruncatedCorner c = TruncatedCorner::sector(Vec2(0.1, -0.2), Vec2(0.3, 1.0), oracle::pi / 5, 0.8);
    const Vec2 apex(0.1, -0.2);
    const AnalyticField v1 = semilin::planeWave(1.5, Vec2(1, 0.3));
    const AnalyticField u1 = combine(combine(v1, apexBump(apex, cplx(2, -1), 1.0, 1.0)), flankBump(c, 0.5));
    const AnalyticField v2 = semilin::planeWave(3.0, Vec2(-0.2, 1));
    const AnalyticField u2 = combine(v2, apexBump(apex, cplx(-1, 0.5), cplx(0, 2), 0.5));
    double worst = 0.0;
    for (double tau : {1.0, 10.0, 40.0}) {
        const CgoProbe p = CgoProbe::forCorner(c, tau);
        worst = std::max(worst, greenIdentityResidual(c, u1, v1, p, 1e-10).relativeResidual);
        worst = std::max(worst, greenIdentityResidual(c, u2, v2, p, 1e-10).relativeResidual);
    }
    v.require(worst <= 1e-8, "max relative residual " + fmt(worst) + " <= 1e-8");
}

// 6. Apex extraction with an analytically known limit.
void extraction(Verdict& v)
{
    const auto t0 = std::chrono::steady_clock::now();
    const TruncatedCorner c = TruncatedCorner::sector(Vec2(0, 0), Vec2(1, 0), oracle::pi / 4, 1.0);
    const AnalyticField bg = semilin::planeWave(1.5, Vec2(1, 0.3));
    const cplx limit(2, -1);
    for (double alpha : {0.5, 1.0}) {
        const AnalyticField u = combine(bg, apexBump(Vec2(0, 0), limit, 1.0, alpha));
        ExtractionOptions o;
        o.mode = BoundaryMode::fullBoundary;
        const ExtractionResult r = extractApexValue(c, u, bg, oracle::logGrid(20, 400, 12), o);
        const double e = relErr(r.limit, limit);
        v.require(e <= 0.02, "alpha " + fmt(alpha) + ": limit error " + fmt(e));
        v.require(std::abs(r.errorOrder - alpha) <= 0.3, "order " + fmt(r.errorOrder));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(secs < 30.0, "runtime " + fmt(secs) + " s < 30 s");
}

// 7. Newton with small data.
void smallData(Verdict& v)
{
    auto mesh = std::make_shared<const TriMesh>(triangulate(kSquare, {kTriangle}, 0.05));
    const VecC psi0 = boundaryValues(*mesh, planeWave(1.0, 2.0, Vec2(1, 1)));
    NewtonOptions o;
    o.tol = 1e-10;
    int worstIter = 0;
    double worstRes = 0.0, lo = 1e300, hi = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const VecC psi = eps * psi0;
        const FemField f = solveSemilinear(mesh, triangleContent(), psi, o);
        worstIter = std::max(worstIter, f.newtonIterations);
        worstRes = std::max(worstRes, f.residualHistory.back());
        const double ratio = h1Norm(*mesh, f.values) / boundaryL2Norm(*mesh, psi);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    v.require(worstIter <= 8, "max Newton iterations " + std::to_string(worstIter));
    v.require(worstRes <= 1e-10, "final residual " + fmt(worstRes));
    v.require(hi / lo < 2.0, "norm ratio spread " + fmt(hi / lo) + " < 2");
}

// 8. Manufactured solution with active semilinear content.
void femConvergence(Verdict& v)
{
    const ConvexPolygon inner = ConvexPolygon::rectangle(0.25, 0.25, 0.75, 0.75);
    ContentModel c;
    c.backgroundLambda = 2.0;
    c.layers = {{-5.0, 1.0}};
    auto exact = [](const Vec2& x) { return 0.5 * std::sin(oracle::pi * x.x() + 0.3) * std::sin(oracle::pi * x.y() + 0.2); };
    auto local = [inner](const Vec2& x, cplx u) {
        return inner.containsClosed(x) ? -5.0 * u + u * u : 2.0 * u;
    };
    // Delta u* = -2 pi^2 u*, and the weak form carries the forcing with a: s = -Delta u* - a(x, u*).
    c.forcing = [&](const Vec2& x) {
        const cplx u = exact(x);
        return 2.0 * oracle::pi * oracle::pi * u - local(x, u);
    };
    auto mesh = std::make_shared<const TriMesh>(triangulate(kSquare, {inner}, 0.2));
    std::vector<double> hs, errs;
    for (int level = 0; level <= 3; ++level) {
        if (level > 0) mesh = std::make_shared<const TriMesh>(refine(*mesh));
        NewtonOptions o;
        o.tol = 1e-12;
        const FemField f = solveSemilinear(mesh, c, boundaryValues(*mesh, [&](const Vec2& x) { return cplx(exact(x)); }), o);
        double s = 0.0;
        for (std::size_t t = 0; t < mesh->triangles.size(); ++t) {
            const auto& tri = mesh->triangles[t];
            for (int e = 0; e < 3; ++e) {
                const int a = tri[e], b = tri[(e + 1) % 3];
                const Vec2 mid = 0.5 * (mesh->nodes[a] + mesh->nodes[b]);
                s += mesh->triangleArea(t) / 3.0 * std::norm(0.5 * (f.values[a] + f.values[b]) - exact(mid));
            }
        }
        hs.push_back(mesh->maxEdgeLength());
        errs.push_back(std::sqrt(s));
    }
    const double rate = oracle::logSlope(hs, errs);
    v.require(std::abs(rate - 2.0) <= 0.2, "L2 rate " + fmt(rate) + " vs 2 +- 0.2");
}

// 9. Small-data remainder.
void expansion(Verdict& v)
{
    const auto t0 = std::chrono::steady_clock::now();
    SmallDataConfig c;
    c.domain = kSquare;
    c.layers = {kTriangle};
    c.content.backgroundLambda = 1.0;
    c.content.layers = {{1.0, 2.0}};
    c.scaling.k0 = 1.0;
    c.scaling.zeta0 = 0.5;  // k = eps^(1/2)
    c.scaling.layerZeta = {0.5};  // lambda_1 = eps^(1/2)
    c.slopeThreshold = 1.2;
    const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
    const ExpansionReport r = smallDataExpansion(c, eps);
    std::vector<double> vn;
    bool decreasing = true;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        vn.push_back(r.rows[i].vNorm);
        if (i > 0) decreasing = decreasing && r.rows[i].vNorm / r.rows[i].eps < r.rows[i - 1].vNorm / r.rows[i - 1].eps;
    }
    const double slope = oracle::logSlope(eps, vn);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(decreasing, "|v|/eps strictly decreasing");
    v.require(slope > 1.2, "log-log slope " + fmt(slope) + " > 1.2");
    v.require(secs < 60.0, "runtime " + fmt(secs) + " s < 60 s");
}

// 10. Coefficient recovery.
void coefficients(Verdict& v)
{
    const std::vector<cplx> apex{cplx(0.3, 0.1), cplx(-0.2, 0.4)};
    const std::vector<cplx> coef{cplx(-3, 1), 2.0};
    std::vector<cplx> g;
    for (cplx u : apex) g.push_back(coef[0] * u + coef[1] * u * u);
    const VandermondeSolution s = recoverCoefficients(apex, g);
    const double ev = std::max(relErr(s.coefficients[0], coef[0]), relErr(s.coefficients[1], coef[1]));
    v.require(ev <= 1e-10, "Vandermonde error " + fmt(ev));

    RecoveryProblem p;
    p.domain = kSquare;
    p.hMesh = 0.025;
    const ContentModel truth = triangleContent();
    for (auto psi : {planeWave(1.0, 2.0, Vec2(1, 1)), planeWave(2.0, 2.0, Vec2(1, -1))})
        p.measurements.push_back({"m", psi, synthesizeCauchyData(kSquare, {kTriangle}, truth, psi, 0.0125)});
    ContentModel init = truth;
    init.layers[0] = {-24.0, 1.6};
    const CoefficientFit f = recoverCoefficientsFromBoundary(p, {kTriangle}, init, {{1, 1}, {1, 2}});
    const double e1 = relErr(f.coefficients[0], -30.0), e2 = relErr(f.coefficients[1], 2.0);
    v.require(e1 <= 0.01 && e2 <= 0.01, "boundary fit errors " + fmt(e1) + ", " + fmt(e2) + " <= 1%");
}

// 11. Triangle from one measurement.
void triangle(Verdict& v)
{
    const auto t0 = std::chrono::steady_clock::now();
    const double h = 0.05;
    const BoundaryFunction psi = planeWave(1.0, 2.0, Vec2(1, 1));
    RecoveryProblem p;
    p.domain = kSquare;
    p.hMesh = h;
    p.measurements.push_back({"m1", psi, synthesizeCauchyData(kSquare, {kTriangle}, triangleContent(), psi, h / 2)});
    // 20% larger and shifted.
    const ConvexPolygon grown = kTriangle.scaled(1.2);
    std::vector<Vec2> init;
    for (const Vec2& x : grown.vertices()) init.push_back(x + Vec2(0.03, -0.02));
    ShapeRecoveryOptions o;
    o.misfitTol = 1.0;
    const ShapeRecoveryResult r = recoverConvexPolygon(p, ConvexPolygon(init), triangleContent(), o);
    double worst = 0.0;
    for (const Vec2& t : kTriangle.vertices()) {
        double best = 1e300;
        for (const Vec2& x : r.shape.vertices()) best = std::min(best, (x - t).norm());
        worst = std::max(worst, best);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(r.shape.size() == 3, "three vertices");
    v.require(worst <= 2 * h, "worst vertex distance " + fmt(worst) + " <= " + fmt(2 * h));
    v.require(secs < 600.0, "runtime " + fmt(secs) + " s < 600 s");
}

// 12. Two-layer class B square nest.
void nest(Verdict& v)
{
    const double h = 0.025;
    const std::vector<ConvexPolygon> truth{ConvexPolygon::rectangle(0.2, 0.2, 0.8, 0.8),
                                           ConvexPolygon::rectangle(0.35, 0.35, 0.65, 0.65)};
    ContentModel c;
    c.backgroundLambda = 4.0;
    c.layers = {{20.0}, {-60.0, 2.0}};
    c.classTag = ContentClass::classB;
    const BoundaryFunction psi = planeWave(1.0, 2.0, Vec2(1, 1));
    RecoveryProblem p;
    p.domain = kSquare;
    p.hMesh = h;
    p.measurements.push_back({"m1", psi, synthesizeCauchyData(kSquare, truth, c, psi, h / 2)});
    NestHypothesis hyp;
    hyp.contentClass = ContentClass::classB;
    hyp.initialLayers = {ConvexPolygon::rectangle(0.19, 0.16, 0.83, 0.8), ConvexPolygon::rectangle(0.37, 0.33, 0.695, 0.655)};
    hyp.initialContent = c;
    hyp.initialContent.layers[0][0] *= 0.8;
    hyp.initialContent.layers[1][0] *= 0.8;
    hyp.slots = {{1, 1}, {2, 1}};
    NestRecoveryOptions o;
    o.similarityShapes = true;
    const NestRecoveryResult r = recoverNest(p, hyp, o);
    for (std::size_t l = 0; l < 2; ++l) {
        const double d = boundaryHausdorff(r.layers[l], truth[l]);
        const double e = relErr(r.content.layers[l][0], c.layers[l][0]);
        v.require(d <= 2 * h, "interface " + std::to_string(l + 1) + " distance " + fmt(d));
        v.require(e <= 0.02, "lambda_" + std::to_string(l + 1) + " error " + fmt(e));
    }
}

// 13. Distinct inclusions, distinct data.
void distinguish(Verdict& v)
{
    const ConvexPolygon other({Vec2(0.32, 0.3), Vec2(0.7, 0.4), Vec2(0.45, 0.7)});
    const BoundaryFunction psi = planeWave(1.0, 2.0, Vec2(1, 1));
    const TriMesh target = triangulate(kSquare, {}, 0.05);
    auto data = [&](const ConvexPolygon& d) {
        return resampleCauchyData(synthesizeCauchyData(kSquare, {d}, triangleContent(), psi, 0.025), target);
    };
    const CauchyData a = data(kTriangle);
    const double gap = cauchyGap(a, data(other));
    const double same = cauchyGap(a, data(kTriangle));
    v.require(gap > 1e-3, "distinct gap " + fmt(gap) + " > 1e-3");
    v.require(same == 0.0, "identical gap " + fmt(same));
}

// 14. Leading-order ratios for assumptions A to D.
void leadingOrder(Verdict& v)
{
    const std::vector<double> eps{1e-2, 1e-3, 1e-4};
    auto run = [&](AssumptionKind kind, AdmissibilityConfig cfg, PlaneWaveScaling s) {
        cfg.domain = kSquare;
        cfg.hMesh = 0.05;
        const LeadingOrderReport r = leadingOrderRatios(kind, cfg, s, eps);
        v.require(r.minRatio >= 0.8 && r.maxRatio <= 1.25,
                  assumptionName(kind) + " [" + fmt(r.minRatio) + ", " + fmt(r.maxRatio) + "]");
    };
    const std::vector<ConvexPolygon> squares{ConvexPolygon::rectangle(0.2, 0.2, 0.8, 0.8),
                                             ConvexPolygon::rectangle(0.35, 0.35, 0.65, 0.65)};
    AdmissibilityConfig single;
    single.layers = {kTriangle};
    single.content.backgroundLambda = 1.0;
    single.content.layers = {{-1.0, 1.0}};
    PlaneWaveScaling s;
    s.layerZeta = {0.5};
    run(AssumptionKind::A, single, s);
    s.multipliers = {1.0, 0.5};
    run(AssumptionKind::B, single, s);

    AdmissibilityConfig classA;
    classA.layers = squares;
    classA.content.backgroundLambda = 1.0;
    classA.content.layers = {{-1.0}, {2.0, 1.0}};
    classA.content.classTag = ContentClass::classA;
    classA.measurementLayer = {1, 2, 2};
    PlaneWaveScaling sa;
    sa.layerZeta = {0.5, 0.5};
    sa.multipliers = {1.0, 1.0, 0.5};
    run(AssumptionKind::C, classA, sa);

    AdmissibilityConfig classB = classA;
    classB.content.classTag = ContentClass::classB;
    classB.measurementLayer.clear();
    PlaneWaveScaling sb;
    sb.layerZeta = {0.5, 0.5};
    run(AssumptionKind::D, classB, sb);
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria{
        {"corner integral decay, 2D sector", sectorDecay},
        {"corner integral decay, 3D cone", coneDecay},
        {"weighted corner integrals", weightedDecay},
        {"lid norm decay and bounds", lidNorms},
        {"Green identity", greenIdentity},
        {"apex extraction", extraction},
        {"Newton with small data", smallData},
        {"FEM convergence", femConvergence},
        {"small-data expansion", expansion},
        {"coefficient recovery", coefficients},
        {"triangle recovery", triangle},
        {"square nest recovery", nest},
        {"distinguishability", distinguish},
        {"assumption leading orders", leadingOrder},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(v);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += v.pass ? 0 : 1;
        std::printf("criterion %2zu %s  %s (%.1f s): %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                    v.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
