#pragma once

#include <array>
#include <complex>
#include <functional>

namespace semilin {

using cplx = std::complex<double>;

struct QuadratureOptions {
    double absTol = 1e-12;
    double relTol = 1e-10;
    int maxSegments = 4000;
};

struct QuadratureResult {
    cplx value;
    double errorEstimate = 0.0;
    int evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b]: the segment
/// with the largest error estimate is bisected until the summed estimate is
/// below max(absTol, relTol*|I|). Throws QuadratureError when maxSegments is
/// exhausted first.
QuadratureResult integrate(const std::function<cplx(double)>& f, double a, double b,
                           const QuadratureOptions& opt = {});

/// Integral over [a, inf) through r = a + t/(1-t).
QuadratureResult integrateToInfinity(const std::function<cplx(double)>& f, double a,
                                     const QuadratureOptions& opt = {});

/// Nested adaptive quadrature over [a0,b0] x [a1(x), b1(x)]. The inner
/// integrals run at a tenth of the requested tolerance.
QuadratureResult integrate2D(const std::function<cplx(double, double)>& f, double a0, double b0,
                             const std::function<double(double)>& a1, const std::function<double(double)>& b1,
                             const QuadratureOptions& opt = {});

/// Fixed 15-point Kronrod rule on [a, b] (used for smooth boundary integrals).
cplx kronrod15(const std::function<cplx(double)>& f, double a, double b);

/// Six-point degree-4 rule on the reference triangle; barycentric points and
/// weights that sum to 1 (multiply by the triangle area).
struct TrianglePoint {
    double l0, l1, l2, weight;
};
const std::array<TrianglePoint, 6>& triangleRule();

}  // namespace semilin
