#include "semilin/indicator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "semilin/errors.hpp"

namespace semilin {

namespace {

Vec2 unit(double th) { return Vec2(std::cos(th), std::sin(th)); }
Vec2 apex2(const TruncatedCorner& c) { return c.apex.head<2>(); }

void requireSector(const TruncatedCorner& c)
{
    if (c.dim != 2 || c.kind != CornerKind::sector) throw GeometryError("the Green identity machinery is 2D only");
    c.validate();
}

// u0 d_nu w - w d_nu u0 at x with unit normal n.
cplx boundaryIntegrand(const AnalyticField& u, const AnalyticField& v, const CgoProbe& probe, const Vec2& x,
                       const Vec2& n)
{
    const cplx u0 = probe.value(x);
    const Eigen::Vector2cd gw = u.gradient(x) - v.gradient(x);
    const cplx w = u.value(x) - v.value(x);
    const Eigen::Vector3cd z = probe.complexDirection();
    const cplx dnU0 = probe.tau * (z[0] * n.x() + z[1] * n.y()) * u0;
    return u0 * (gw[0] * n.x() + gw[1] * n.y()) - w * dnU0;
}

double fieldScale(const TruncatedCorner& c, const AnalyticField& u, const AnalyticField& v)
{
    double s = 0.0;
    for (int i = 0; i <= 8; ++i)
        for (int j = 0; j <= 8; ++j) {
            const Vec2 x = apex2(c) + c.radius * (i / 8.0) * unit(c.thetaMin() + (c.thetaMax() - c.thetaMin()) * j / 8.0);
            s = std::max({s, std::abs(u.value(x)), std::abs(v.value(x)), std::abs(u.laplacian(x)),
                          std::abs(v.laplacian(x))});
        }
    return std::max(s, 1e-300);
}

struct BoundarySide {
    cplx lid, flanks;
};

BoundarySide boundarySide(const TruncatedCorner& c, const AnalyticField& u, const AnalyticField& v,
                          const CgoProbe& probe, const QuadratureOptions& opt, bool withFlanks)
{
    const Vec2 x0 = apex2(c);
    const double h = c.radius;
    BoundarySide b;
    b.lid = integrate(
                [&](double th) { return boundaryIntegrand(u, v, probe, x0 + h * unit(th), unit(th)) * h; },
                c.thetaMin(), c.thetaMax(), opt)
                .value;
    if (withFlanks) {
        const double tM = c.thetaMax(), tm = c.thetaMin();
        const Vec2 nM(-std::sin(tM), std::cos(tM)), nm(std::sin(tm), -std::cos(tm));
        b.flanks = integrate([&](double r) { return boundaryIntegrand(u, v, probe, x0 + r * unit(tM), nM); }, 0.0, h,
                             opt)
                       .value +
                   integrate([&](double r) { return boundaryIntegrand(u, v, probe, x0 + r * unit(tm), nm); }, 0.0, h,
                             opt)
                       .value;
    }
    return b;
}

ExtractionResult extract(const TruncatedCorner& corner, const AnalyticField& u, const AnalyticField& v,
                         const std::vector<double>& taus, const ExtractionOptions& opt, double sign)
{
    requireSector(corner);
    if (taus.size() < 5) throw FitError("extraction needs at least 5 tau values");
    if (opt.mode == BoundaryMode::lidOnly) {
        const double mismatch = flankMismatch(corner, u, v);
        if (mismatch > opt.flankTol) {
            std::ostringstream msg;
            msg << "flank Cauchy data differ by " << mismatch << " (tolerance " << opt.flankTol << ")";
            throw FlankMismatchError(msg.str());
        }
    }
    const double scale = fieldScale(corner, u, v);
    ExtractionResult res;
    res.mode = opt.mode;
    res.taus = taus;
    for (double tau : taus) {
        const CgoProbe probe = CgoProbe::forCorner(corner, tau);
        const cplx d = cornerIntegral(probe, IntegralMethod::quadrature, opt.relTol).value;
        QuadratureOptions q;
        q.relTol = opt.relTol;
        q.absTol = 1e-3 * opt.relTol * scale * std::abs(d);
        const BoundarySide b = boundarySide(corner, u, v, probe, q, opt.mode == BoundaryMode::fullBoundary);
        res.denominators.push_back(d);
        res.estimates.push_back(sign * (b.lid + b.flanks) / d);
    }
    const std::size_t first = taus.size() / 2;
    const std::vector<double> t(taus.begin() + first, taus.end());
    const std::vector<cplx> e(res.estimates.begin() + first, res.estimates.end());
    const AlgebraicExtrapolation fit = fitAlgebraicTail(t, e);
    res.limit = fit.limit;
    res.errorOrder = fit.order;
    res.errorCoefficient = fit.coefficient;
    return res;
}

}  // namespace

AnalyticField combine(const AnalyticField& a, const AnalyticField& b, double signB)
{
    return {[a, b, signB](const Vec2& x) { return a.value(x) + signB * b.value(x); },
            [a, b, signB](const Vec2& x) -> Eigen::Vector2cd { return a.gradient(x) + signB * b.gradient(x); },
            [a, b, signB](const Vec2& x) { return a.laplacian(x) + signB * b.laplacian(x); }};
}

AnalyticField planeWave(double k, const Vec2& dir)
{
    const Vec2 d = dir.normalized();
    const cplx i(0.0, 1.0);
    auto val = [k, d, i](const Vec2& x) { return std::exp(i * k * d.dot(x)); };
    return {val,
            [val, k, d, i](const Vec2& x) -> Eigen::Vector2cd { return (i * k * val(x)) * d.cast<cplx>(); },
            [val, k](const Vec2& x) { return -k * k * val(x); }};
}

AnalyticField apexBump(const Vec2& apex, cplx c, cplx b, double alpha)
{
    if (!(alpha > 0)) throw GeometryError("bump exponent alpha must be positive");
    const double p = 2 + alpha;
    return {[=](const Vec2& x) {
                const double r = (x - apex).norm();
                return 0.25 * c * r * r + b * std::pow(r, p) / (p * p);
            },
            [=](const Vec2& x) -> Eigen::Vector2cd {
                const Vec2 y = x - apex;
                const double r = y.norm();
                return (0.5 * c + b * std::pow(r, alpha) / p) * y.cast<cplx>();
            },
            [=](const Vec2& x) { return c + b * std::pow((x - apex).norm(), alpha); }};
}

AnalyticField flankBump(const TruncatedCorner& corner, cplx gamma)
{
    requireSector(corner);
    const Vec2 x0 = apex2(corner);
    const double tM = corner.thetaMax(), tm = corner.thetaMin();
    const Vec2 n1(-std::sin(tM), std::cos(tM)), n2(std::sin(tm), -std::cos(tm));
    const double n12 = n1.dot(n2);
    return {[=](const Vec2& x) {
                const double l1 = n1.dot(x - x0), l2 = n2.dot(x - x0);
                return gamma * l1 * l1 * l2 * l2;
            },
            [=](const Vec2& x) -> Eigen::Vector2cd {
                const double l1 = n1.dot(x - x0), l2 = n2.dot(x - x0);
                return gamma * (2 * l1 * l2 * l2 * n1 + 2 * l1 * l1 * l2 * n2).cast<cplx>();
            },
            [=](const Vec2& x) {
                const double l1 = n1.dot(x - x0), l2 = n2.dot(x - x0);
                return gamma * (2 * l2 * l2 + 8 * l1 * l2 * n12 + 2 * l1 * l1);
            }};
}

GreenTerms greenIdentityResidual(const TruncatedCorner& corner, const AnalyticField& u, const AnalyticField& v,
                                 const CgoProbe& probe, double relTol)
{
    requireSector(corner);
    const Vec2 x0 = apex2(corner);
    const double scale = fieldScale(corner, u, v);
    const double d = std::abs(cornerIntegral(probe, IntegralMethod::quadrature, relTol).value);
    QuadratureOptions q;
    q.relTol = relTol;
    q.absTol = 1e-3 * relTol * scale * d;
    QuadratureOptions inner = q;
    inner.relTol *= 0.1;
    inner.absTol *= 0.1;

    GreenTerms g;
    g.volume = integrate(
                   [&](double th) {
                       const Vec2 e = unit(th);
                       return integrate(
                                  [&](double r) {
                                      const Vec2 x = x0 + r * e;
                                      return (u.laplacian(x) - v.laplacian(x)) * probe.value(x) * r;
                                  },
                                  0.0, corner.radius, inner)
                           .value;
                   },
                   corner.thetaMin(), corner.thetaMax(), q)
                   .value;
    const BoundarySide b = boundarySide(corner, u, v, probe, q, true);
    g.lid = b.lid;
    g.flanks = b.flanks;
    g.residual = std::abs(g.volume - g.lid - g.flanks);
    const double ref = std::max(std::abs(g.volume), std::abs(g.lid) + std::abs(g.flanks));
    g.relativeResidual = ref > 0 ? g.residual / ref : g.residual;
    return g;
}

ExtractionResult extractApexValue(const TruncatedCorner& corner, const AnalyticField& u, const AnalyticField& v,
                                  const std::vector<double>& taus, const ExtractionOptions& opt)
{
    return extract(corner, u, v, taus, opt, 1.0);
}

ExtractionResult extractTwoContentGap(const TruncatedCorner& corner, const AnalyticField& u,
                                      const AnalyticField& v, const std::vector<double>& taus,
                                      const ExtractionOptions& opt)
{
    return extract(corner, u, v, taus, opt, -1.0);
}

double flankMismatch(const TruncatedCorner& corner, const AnalyticField& u, const AnalyticField& v)
{
    requireSector(corner);
    const Vec2 x0 = apex2(corner);
    const double scale = fieldScale(corner, u, v);
    double worst = 0.0;
    constexpr int kSamples = 64;
    for (double th : {corner.thetaMin(), corner.thetaMax()}) {
        const Vec2 e = unit(th);
        const Vec2 n(-e.y(), e.x());
        for (int i = 0; i <= kSamples; ++i) {
            const Vec2 x = x0 + corner.radius * (double(i) / kSamples) * e;
            const Eigen::Vector2cd g = u.gradient(x) - v.gradient(x);
            worst = std::max({worst, std::abs(u.value(x) - v.value(x)),
                              corner.radius * std::abs(g[0] * n.x() + g[1] * n.y())});
        }
    }
    return worst / scale;
}

void ExtractionResult::writeCsv(std::ostream& os) const
{
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << "tau,re_E,im_E\n";
    for (std::size_t i = 0; i < taus.size(); ++i)
        os << taus[i] << ',' << estimates[i].real() << ',' << estimates[i].imag() << '\n';
    os.precision(old);
}

}  // namespace semilin
