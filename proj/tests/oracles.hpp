#pragma once

// Reference computations written independently of the library.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

// Composite Gauss-Legendre (5 points) on [a, b] with n panels.
inline cplx gauss(const std::function<cplx(double)>& f, double a, double b, int n)
{
    static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
    static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                                0.2369268850561891};
    cplx s = 0.0;
    const double hp = (b - a) / n;
    for (int p = 0; p < n; ++p) {
        const double m = a + (p + 0.5) * hp;
        for (int i = 0; i < 5; ++i) s += w[i] * f(m + 0.5 * hp * x[i]);
    }
    return 0.5 * hp * s;
}

// Integral of exp(tau e^{i(phi - beta)} r) r dr dphi over the infinite sector
// phi in [t1, t2], with Re e^{i(phi - beta)} < 0:
// int dphi / (tau^2 e^{2i(phi - beta)}).
inline cplx infiniteSector(double tau, double beta, double t1, double t2)
{
    const cplx i(0.0, 1.0);
    auto prim = [&](double phi) { return std::exp(-2.0 * i * (phi - beta)) / (-2.0 * i); };
    return (prim(t2) - prim(t1)) / (tau * tau);
}

// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double logSlope(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < x.size(); ++k) {
        lx.push_back(std::log(x[k]));
        ly.push_back(std::log(y[k]));
    }
    return slope(lx, ly);
}

inline std::vector<double> logGrid(double a, double b, int n)
{
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(a * std::pow(b / a, static_cast<double>(k) / (n - 1)));
    return out;
}

}  // namespace oracle
