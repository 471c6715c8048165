#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "semilin/probes.hpp"

namespace semilin {

/// Smooth 2D field known in closed form.
struct AnalyticField {
    std::function<cplx(const Vec2&)> value;
    std::function<Eigen::Vector2cd(const Vec2&)> gradient;
    std::function<cplx(const Vec2&)> laplacian;
};

/// Sum of two fields with a sign on the second.
AnalyticField combine(const AnalyticField& a, const AnalyticField& b, double signB = 1.0);

/// Plane wave exp(i k dir.x): Delta v + k^2 v = 0.
AnalyticField planeWave(double k, const Vec2& dir);

/// (c/4) r^2 + b r^(2+alpha) / (2+alpha)^2 with r = |x - apex|, whose
/// Laplacian is c + b r^alpha: value c at the apex, Holder remainder of order alpha.
AnalyticField apexBump(const Vec2& apex, cplx c, cplx b, double alpha);

/// gamma * l1^2 l2^2 with l1, l2 the distances to the two flank lines of a
/// sector: the field and its gradient vanish on both flanks.
AnalyticField flankBump(const TruncatedCorner& corner, cplx gamma);

/// The two sides of the Green identity on a 2D truncated corner for
/// w = u - v and the harmonic probe u0:
///   int_C (Delta u - Delta v) u0 = int_{dC} u0 d_nu w - w d_nu u0.
struct GreenTerms {
    cplx volume;
    cplx lid;     // arc r = h
    cplx flanks;  // both straight sides
    double residual = 0.0;          // |volume - lid - flanks|
    double relativeResidual = 0.0;  // residual / max(|volume|, |lid| + |flanks|)
};

GreenTerms greenIdentityResidual(const TruncatedCorner& corner, const AnalyticField& u, const AnalyticField& v,
                                 const CgoProbe& probe, double relTol = 1e-10);

/// lidOnly: numerator over the lid only; requires u = v and d_nu u = d_nu v on
/// the flanks and throws FlankMismatchError otherwise. Under that hypothesis
/// the limit is always 0 for C^2 data. fullBoundary: numerator over the whole
/// corner boundary, so the estimate is the probe-weighted mean of
/// Delta(u - v) and converges to its apex value.
enum class BoundaryMode { lidOnly, fullBoundary };

struct ExtractionResult {
    std::vector<double> taus;
    std::vector<cplx> estimates;
    std::vector<cplx> denominators;  // int_C u0
    cplx limit;
    double errorOrder = 0.0;
    cplx errorCoefficient;
    BoundaryMode mode = BoundaryMode::lidOnly;
    /// Columns: tau, re_E, im_E.
    void writeCsv(std::ostream& os) const;
};

struct ExtractionOptions {
    BoundaryMode mode = BoundaryMode::lidOnly;
    double flankTol = 1e-10;  // relative to the field scale on the corner
    double relTol = 1e-11;
};

/// E(tau) = B(tau) / int_C u0 with B the boundary side of the Green identity;
/// the limit and the remainder order come from fitting L + C tau^(-beta) on
/// the upper half of the tau grid. Converges to lambda v(x0) - f(x0, u(x0)).
ExtractionResult extractApexValue(const TruncatedCorner& corner, const AnalyticField& u, const AnalyticField& v,
                                  const std::vector<double>& taus, const ExtractionOptions& opt = {});

/// Same machinery for Delta u = -f1, Delta v = -f2: E(tau) = -B(tau) / int_C u0,
/// which converges to f1(x0, u(x0)) - f2(x0, v(x0)).
ExtractionResult extractTwoContentGap(const TruncatedCorner& corner, const AnalyticField& u,
                                      const AnalyticField& v, const std::vector<double>& taus,
                                      const ExtractionOptions& opt = {});

/// Largest of |u - v| and |d_nu (u - v)| sampled on the flanks, divided by
/// the largest |u|, |v| sampled on the corner.
double flankMismatch(const TruncatedCorner& corner, const AnalyticField& u, const AnalyticField& v);

}  // namespace semilin
