#pragma once

#include <complex>
#include <vector>

namespace semilin {

using cplx = std::complex<double>;

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rmsResidual = 0.0;
    double maxResidual = 0.0;
};

/// Ordinary least squares y = intercept + slope*x. Throws FitError with fewer
/// than two points or zero variance in x.
LineFit fitLine(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log|v| against log(x).
LineFit fitPowerLaw(const std::vector<double>& x, const std::vector<double>& v);

/// Slope of log|v| against x.
LineFit fitExponentialRate(const std::vector<double>& x, const std::vector<double>& v);

struct AlgebraicExtrapolation {
    cplx limit;
    cplx coefficient;
    double order = 0.0;
    double rmsResidual = 0.0;
};

/// Fit E(t) = L + C t^(-beta) in least squares: L and C are linear for a
/// fixed beta, and beta is found by a scan of [betaMin, betaMax] refined by
/// golden-section search.
AlgebraicExtrapolation fitAlgebraicTail(const std::vector<double>& t, const std::vector<cplx>& e,
                                        double betaMin = 0.01, double betaMax = 6.0);

/// n points log-spaced on [a, b].
std::vector<double> logspace(double a, double b, int n);

}  // namespace semilin
