#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "semilin/fit.hpp"
#include "semilin/geometry.hpp"
#include "semilin/quadrature.hpp"

namespace semilin {

/// Harmonic exponential u0(x) = exp(tau (d + i dPerp) . (x - apex)).
struct CgoProbe {
    ProbeDirection direction;
    double tau = 1.0;
    TruncatedCorner corner;
    double exponentCap = 700.0;

    static CgoProbe forCorner(const TruncatedCorner& corner, double tau, double slack = 0.0);

    /// Throws ProbeOverflowError when the real part of the exponent exceeds the cap.
    cplx value(const Vec3& x) const;
    cplx value(const Vec2& x) const { return value(Vec3(x.x(), x.y(), 0.0)); }
    Eigen::Vector3cd gradient(const Vec3& x) const;
    Eigen::Vector3cd complexDirection() const;
};

enum class IntegralMethod { closedForm2D, quadrature };

/// Integral of u0 over the truncated corner.
QuadratureResult cornerIntegral(const CgoProbe& probe, IntegralMethod method = IntegralMethod::quadrature,
                                double relTol = 1e-10);

/// Integral of u0 over the untruncated 2D sector, in closed form.
cplx infiniteSectorIntegral(const CgoProbe& probe);

/// Integral of |x - apex|^alpha u0 over the truncated corner.
QuadratureResult weightedCornerIntegral(const CgoProbe& probe, double alpha, double relTol = 1e-10);

/// int_0^rMax r^(p-1) exp(-mu r) dr by adaptive quadrature (rMax may be infinite).
QuadratureResult radialMoment(double p, cplx mu, double rMax, double relTol = 1e-12);

/// Nominal constant C in |int u0| >= C tau^-n: 2 theta0 for sectors and
/// sqrt(2) pi (1 - cos theta0) for circular cones. The sector value is larger
/// than the true leading constant sin(2 theta0), so it is not a lower bound.
double nominalLowerBoundConstant(const TruncatedCorner& corner);
/// Leading constant of |int u0| tau^n for the infinite corner: sin(2 theta0)
/// for a sector, the angular integral of Gamma(3)/|mu/tau|^3 for cones.
double exactLeadingConstant(const TruncatedCorner& corner);

/// Angular measure of the corner (arc length on the unit circle or solid angle).
double angularMeasure(const TruncatedCorner& corner);

struct LidNorms {
    double l2 = 0.0;          // ||u0||_L2(lid)
    double h1 = 0.0;          // sqrt(int |u0|^2 + |grad u0|^2) over the lid
    double dnu = 0.0;         // ||d_nu u0||_L2(lid)
    double lidMeasure = 0.0;  // h^(n-1) times the angular measure
    double boundL2 = 0.0;     // sqrt(lidMeasure) exp(-zeta h tau)
    double boundH1 = 0.0;     // sqrt(lidMeasure) (2 tau^2 + 1)^(1/2) exp(-zeta h tau)
    double boundDnu = 0.0;    // sqrt(lidMeasure) sqrt(2) tau exp(-zeta h tau)
};

LidNorms lidNormEstimates(const CgoProbe& probe, double relTol = 1e-10);

enum class SweepQuantity { cornerIntegral, weightedIntegral, lidL2, lidH1, lidDnu };

struct SweepReport {
    SweepQuantity quantity = SweepQuantity::cornerIntegral;
    std::vector<double> taus;
    std::vector<double> values;  // moduli
    std::vector<double> bounds;
    std::vector<double> ratios;  // value / bound
    LineFit fit;  // log-log slope for integrals, log-linear rate for lid norms
    std::string quantityName() const;
    /// Columns: tau, quantity, bound, ratio.
    void writeCsv(std::ostream& os) const;
};

/// Evaluates one quantity over a tau grid (at least 5 points) and fits the
/// power law (integrals) or the exponential rate (lid norms). Bounds are the
/// nominal lower bound for the plain integral, |S| Gamma(alpha+n)/(zeta tau)^(alpha+n)
/// for the weighted one and the LidNorms bounds otherwise.
SweepReport tauSweep(const TruncatedCorner& corner, const std::vector<double>& taus, SweepQuantity quantity,
                     double alpha = 0.0, double relTol = 1e-10);

}  // namespace semilin
