#include "semilin/probes.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "semilin/errors.hpp"

namespace semilin {

namespace {

constexpr double kNoAbsTol = 1e-300;

QuadratureOptions relative(double relTol)
{
    QuadratureOptions o;
    o.absTol = kNoAbsTol;
    o.relTol = relTol;
    o.maxSegments = 4000;
    return o;
}

Vec3 orthogonalTo(const Vec3& u)
{
    Vec3 e = std::abs(u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    return u.cross(e).normalized();
}

// Integral of f(xhat) over the corner's directions (unit circle arc in 2D,
// spherical cap or spherical polygon in 3D) with the surface element.
QuadratureResult integrateDirections(const TruncatedCorner& c, const std::function<cplx(const Vec3&)>& f,
                                     double relTol)
{
    const QuadratureOptions outer = relative(relTol);
    const QuadratureOptions inner = relative(0.1 * relTol);
    QuadratureResult total;
    int evals = 0;
    if (c.dim == 2) {
        total = integrate([&](double th) { return f(Vec3(std::cos(th), std::sin(th), 0.0)); }, c.thetaMin(),
                          c.thetaMax(), outer);
        return total;
    }
    if (c.kind == CornerKind::circularCone) {
        const Vec3 e1 = orthogonalTo(c.axis), e2 = c.axis.cross(e1);
        total = integrate(
            [&](double beta) {
                const Vec3 side = std::cos(beta) * e1 + std::sin(beta) * e2;
                auto r = integrate(
                    [&](double a) { return f(std::cos(a) * c.axis + std::sin(a) * side) * std::sin(a); }, 0.0,
                    c.halfAngle, inner);
                evals += r.evaluations;
                return r.value;
            },
            0.0, 2 * kPi, outer);
        total.evaluations = evals;
        return total;
    }
    // Polyhedral: fan of spherical triangles (axis, e_k, e_k+1) by central projection.
    const std::size_t m = c.edges.size();
    for (std::size_t k = 0; k < m; ++k) {
        const Vec3 a = c.edges[k], b = c.edges[(k + 1) % m];
        auto r = integrate(
            [&](double t) {
                const Vec3 q = (1 - t) * a + t * b - c.axis;
                auto ri = integrate(
                    [&](double s) {
                        const Vec3 p = c.axis + s * q;
                        const Vec3 dt = s * (b - a);
                        const double pn = p.norm();
                        const double jac = std::abs(p.dot(q.cross(dt))) / (pn * pn * pn);
                        return f(p / pn) * jac;
                    },
                    0.0, 1.0, inner);
                evals += ri.evaluations;
                return ri.value;
            },
            0.0, 1.0, outer);
        total.value += r.value;
        total.errorEstimate += r.errorEstimate;
    }
    total.evaluations = evals;
    return total;
}

// Integral over the truncated corner of g(r, xhat) r^(n-1).
QuadratureResult integrateCorner(const TruncatedCorner& c, const std::function<cplx(double, const Vec3&)>& g,
                                 double relTol)
{
    const QuadratureOptions radial = relative(0.01 * relTol);
    int evals = 0;
    auto res = integrateDirections(
        c,
        [&](const Vec3& xhat) {
            auto r = integrate([&](double rr) { return g(rr, xhat) * std::pow(rr, c.dim - 1); }, 0.0, c.radius,
                               radial);
            evals += r.evaluations;
            return r.value;
        },
        relTol);
    res.evaluations += evals;
    return res;
}

}  // namespace

CgoProbe CgoProbe::forCorner(const TruncatedCorner& corner, double tau, double slack)
{
    if (!(tau > 0) || !std::isfinite(tau)) throw GeometryError("probe modulus tau must be positive");
    CgoProbe p;
    p.direction = chooseProbeDirection(corner, slack);
    p.tau = tau;
    p.corner = corner;
    return p;
}

Eigen::Vector3cd CgoProbe::complexDirection() const
{
    return direction.d.cast<cplx>() + cplx(0.0, 1.0) * direction.dPerp.cast<cplx>();
}

cplx CgoProbe::value(const Vec3& x) const
{
    const Vec3 y = x - corner.apex;
    const double re = tau * direction.d.dot(y);
    if (re > exponentCap) {
        std::ostringstream msg;
        msg << "probe exponent " << re << " exceeds the overflow cap " << exponentCap;
        throw ProbeOverflowError(msg.str());
    }
    return std::exp(cplx(re, tau * direction.dPerp.dot(y)));
}

Eigen::Vector3cd CgoProbe::gradient(const Vec3& x) const { return tau * complexDirection() * value(x); }

QuadratureResult cornerIntegral(const CgoProbe& probe, IntegralMethod method, double relTol)
{
    const auto& c = probe.corner;
    const Eigen::Vector3cd w = probe.complexDirection();
    if (method == IntegralMethod::closedForm2D) {
        if (c.dim != 2) throw GeometryError("closed form is available for 2D sectors only");
        // Tail beyond r = h: int_h^inf r exp(-mu r) dr = exp(-mu h)(mu h + 1)/mu^2.
        const double h = c.radius;
        auto tail = integrate(
            [&](double th) {
                const Vec3 xhat(std::cos(th), std::sin(th), 0.0);
                const cplx mu = -probe.tau * (w[0] * xhat[0] + w[1] * xhat[1]);
                return std::exp(-mu * h) * (mu * h + 1.0) / (mu * mu);
            },
            c.thetaMin(), c.thetaMax(), relative(relTol));
        QuadratureResult res;
        res.value = infiniteSectorIntegral(probe) - tail.value;
        res.errorEstimate = tail.errorEstimate;
        res.evaluations = tail.evaluations;
        return res;
    }
    return integrateCorner(
        c,
        [&](double r, const Vec3& xhat) {
            const cplx mu = -probe.tau * (w[0] * xhat[0] + w[1] * xhat[1] + w[2] * xhat[2]);
            return std::exp(-mu * r);
        },
        relTol);
}

cplx infiniteSectorIntegral(const CgoProbe& probe)
{
    const auto& c = probe.corner;
    if (c.dim != 2) throw GeometryError("closed form is available for 2D sectors only");
    // d.xhat + i dPerp.xhat = exp(i(theta - phi_d)), so the radial Laplace
    // transform gives exp(-2i(theta - phi_d)) / tau^2 to integrate in theta.
    const double phiD = std::atan2(probe.direction.d.y(), probe.direction.d.x());
    const Vec3 rot(-probe.direction.d.y(), probe.direction.d.x(), 0.0);
    if ((rot - probe.direction.dPerp).norm() > 1e-12)
        throw GeometryError("closed form needs dPerp to be d rotated by +90 degrees");
    const cplx i(0.0, 1.0);
    const double t2 = probe.tau * probe.tau;
    return 0.5 * i * (std::exp(-2.0 * i * (c.thetaMax() - phiD)) - std::exp(-2.0 * i * (c.thetaMin() - phiD))) / t2;
}

QuadratureResult weightedCornerIntegral(const CgoProbe& probe, double alpha, double relTol)
{
    if (!(alpha > 0)) throw GeometryError("weight exponent alpha must be positive");
    const Eigen::Vector3cd w = probe.complexDirection();
    return integrateCorner(
        probe.corner,
        [&](double r, const Vec3& xhat) {
            const cplx mu = -probe.tau * (w[0] * xhat[0] + w[1] * xhat[1] + w[2] * xhat[2]);
            return std::pow(r, alpha) * std::exp(-mu * r);
        },
        relTol);
}

QuadratureResult radialMoment(double p, cplx mu, double rMax, double relTol)
{
    if (!(mu.real() > 0)) throw QuadratureError("radial moment needs Re mu > 0");
    auto f = [&](double r) { return std::pow(r, p - 1) * std::exp(-mu * r); };
    if (std::isinf(rMax)) {
        // Split at a few decay lengths so the mapped integrand stays smooth.
        const double split = 10.0 / mu.real();
        auto a = integrate(f, 0.0, split, relative(relTol));
        auto b = integrateToInfinity(f, split, relative(relTol));
        a.value += b.value;
        a.errorEstimate += b.errorEstimate;
        a.evaluations += b.evaluations;
        return a;
    }
    return integrate(f, 0.0, rMax, relative(relTol));
}

double nominalLowerBoundConstant(const TruncatedCorner& corner)
{
    if (corner.dim == 2) return 2 * corner.halfAngle;
    return std::sqrt(2.0) * kPi * (1 - std::cos(corner.halfAngle));
}

double exactLeadingConstant(const TruncatedCorner& corner)
{
    if (corner.dim == 2) return std::sin(2 * corner.halfAngle);
    const CgoProbe p = CgoProbe::forCorner(corner, 1.0);
    const Eigen::Vector3cd w = p.complexDirection();
    const double gammaN = std::tgamma(double(corner.dim));
    auto res = integrateDirections(
        corner,
        [&](const Vec3& xhat) {
            const cplx mu = -(w[0] * xhat[0] + w[1] * xhat[1] + w[2] * xhat[2]);
            return gammaN / std::pow(mu, corner.dim);
        },
        1e-12);
    return std::abs(res.value);
}

double angularMeasure(const TruncatedCorner& corner)
{
    if (corner.dim == 2) return 2 * corner.halfAngle;
    if (corner.kind == CornerKind::circularCone) return 2 * kPi * (1 - std::cos(corner.halfAngle));
    return std::abs(integrateDirections(corner, [](const Vec3&) { return cplx(1.0); }, 1e-12).value);
}

LidNorms lidNormEstimates(const CgoProbe& probe, double relTol)
{
    const auto& c = probe.corner;
    const double h = c.radius, tau = probe.tau;
    const Eigen::Vector3cd w = probe.complexDirection();
    const double scale = std::pow(h, c.dim - 1);
    const double u2 = scale * integrateDirections(
                                  c,
                                  [&](const Vec3& xhat) {
                                      return cplx(std::exp(2 * tau * h * probe.direction.d.dot(xhat)));
                                  },
                                  relTol)
                                  .value.real();
    const double dn2 = scale * integrateDirections(
                                   c,
                                   [&](const Vec3& xhat) {
                                       const cplx s = w[0] * xhat[0] + w[1] * xhat[1] + w[2] * xhat[2];
                                       return cplx(tau * tau * std::norm(s) *
                                                   std::exp(2 * tau * h * probe.direction.d.dot(xhat)));
                                   },
                                   relTol)
                                   .value.real();
    LidNorms n;
    n.l2 = std::sqrt(u2);
    n.h1 = std::sqrt((1 + 2 * tau * tau) * u2);
    n.dnu = std::sqrt(dn2);
    n.lidMeasure = scale * angularMeasure(c);
    const double decay = std::exp(-probe.direction.zeta * h * tau);
    n.boundL2 = std::sqrt(n.lidMeasure) * decay;
    n.boundH1 = std::sqrt(n.lidMeasure) * std::sqrt(2 * tau * tau + 1) * decay;
    n.boundDnu = std::sqrt(n.lidMeasure) * std::sqrt(2.0) * tau * decay;
    return n;
}

std::string SweepReport::quantityName() const
{
    switch (quantity) {
        case SweepQuantity::cornerIntegral: return "corner_integral";
        case SweepQuantity::weightedIntegral: return "weighted_integral";
        case SweepQuantity::lidL2: return "lid_l2";
        case SweepQuantity::lidH1: return "lid_h1";
        case SweepQuantity::lidDnu: return "lid_dnu";
    }
    return "unknown";
}

void SweepReport::writeCsv(std::ostream& os) const
{
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << "tau," << quantityName() << ",bound,ratio\n";
    for (std::size_t i = 0; i < taus.size(); ++i)
        os << taus[i] << ',' << values[i] << ',' << bounds[i] << ',' << ratios[i] << '\n';
    os.precision(old);
}

SweepReport tauSweep(const TruncatedCorner& corner, const std::vector<double>& taus, SweepQuantity quantity,
                     double alpha, double relTol)
{
    if (taus.size() < 5) throw FitError("tau sweep needs at least 5 grid points");
    SweepReport rep;
    rep.quantity = quantity;
    rep.taus = taus;
    const int n = corner.dim;
    const double measure = angularMeasure(corner);
    for (double tau : taus) {
        const CgoProbe p = CgoProbe::forCorner(corner, tau);
        double value = 0.0, bound = 0.0;
        switch (quantity) {
            case SweepQuantity::cornerIntegral:
                value = std::abs(cornerIntegral(p, IntegralMethod::quadrature, relTol).value);
                bound = nominalLowerBoundConstant(corner) * std::pow(tau, -n);
                break;
            case SweepQuantity::weightedIntegral:
                value = std::abs(weightedCornerIntegral(p, alpha, relTol).value);
                bound = measure * std::tgamma(alpha + n) * std::pow(p.direction.zeta * tau, -(alpha + n));
                break;
            default: {
                const LidNorms ln = lidNormEstimates(p, relTol);
                if (quantity == SweepQuantity::lidL2) {
                    value = ln.l2;
                    bound = ln.boundL2;
                } else if (quantity == SweepQuantity::lidH1) {
                    value = ln.h1;
                    bound = ln.boundH1;
                } else {
                    value = ln.dnu;
                    bound = ln.boundDnu;
                }
            }
        }
        rep.values.push_back(value);
        rep.bounds.push_back(bound);
        rep.ratios.push_back(value / bound);
    }
    if (quantity == SweepQuantity::cornerIntegral || quantity == SweepQuantity::weightedIntegral)
        rep.fit = fitPowerLaw(rep.taus, rep.values);
    else
        rep.fit = fitExponentialRate(rep.taus, rep.values);
    return rep;
}

}  // namespace semilin
