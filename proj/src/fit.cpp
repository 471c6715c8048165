#include "semilin/fit.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "semilin/errors.hpp"

namespace semilin {

LineFit fitLine(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    if (n != y.size()) throw FitError("fit abscissa and ordinate lengths differ");
    if (n < 2) throw FitError("fit needs at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw FitError("fit data is not finite");
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0)) throw FitError("degenerate fit: abscissae have zero variance");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        ss += r * r;
        f.maxResidual = std::max(f.maxResidual, std::abs(r));
    }
    f.rmsResidual = std::sqrt(ss / n);
    return f;
}

LineFit fitPowerLaw(const std::vector<double>& x, const std::vector<double>& v)
{
    std::vector<double> lx, lv;
    for (std::size_t i = 0; i < x.size() && i < v.size(); ++i) {
        if (!(x[i] > 0) || !(std::abs(v[i]) > 0)) throw FitError("power-law fit needs positive data");
        lx.push_back(std::log(x[i]));
        lv.push_back(std::log(std::abs(v[i])));
    }
    if (x.size() != v.size()) throw FitError("fit abscissa and ordinate lengths differ");
    return fitLine(lx, lv);
}

LineFit fitExponentialRate(const std::vector<double>& x, const std::vector<double>& v)
{
    if (x.size() != v.size()) throw FitError("fit abscissa and ordinate lengths differ");
    std::vector<double> lv;
    for (double a : v) {
        if (!(std::abs(a) > 0)) throw FitError("exponential-rate fit needs nonzero data");
        lv.push_back(std::log(std::abs(a)));
    }
    return fitLine(x, lv);
}

namespace {

struct TailFit {
    cplx limit, coefficient;
    double residual;
};

TailFit solveTail(const std::vector<double>& t, const std::vector<cplx>& e, double beta)
{
    const int n = static_cast<int>(t.size());
    Eigen::MatrixXcd a(n, 2);
    Eigen::VectorXcd b(n);
    for (int i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = std::pow(t[i], -beta);
        b(i) = e[i];
    }
    // Column scaling keeps the normal equations well balanced for large beta.
    const double s = a.col(1).norm();
    a.col(1) /= s;
    const Eigen::VectorXcd x = a.colPivHouseholderQr().solve(b);
    return {x(0), x(1) / s, (a * x - b).norm()};
}

}  // namespace

AlgebraicExtrapolation fitAlgebraicTail(const std::vector<double>& t, const std::vector<cplx>& e, double betaMin,
                                        double betaMax)
{
    if (t.size() != e.size()) throw FitError("fit abscissa and ordinate lengths differ");
    if (t.size() < 3) throw FitError("algebraic tail fit needs at least three points");
    for (double x : t)
        if (!(x > 0)) throw FitError("algebraic tail fit needs positive abscissae");

    constexpr int kScan = 120;
    double bestBeta = betaMin, bestRes = std::numeric_limits<double>::infinity();
    const double step = (betaMax - betaMin) / kScan;
    for (int k = 0; k <= kScan; ++k) {
        const double beta = betaMin + k * step;
        const double r = solveTail(t, e, beta).residual;
        if (r < bestRes) {
            bestRes = r;
            bestBeta = beta;
        }
    }
    double lo = std::max(betaMin, bestBeta - step), hi = std::min(betaMax, bestBeta + step);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = solveTail(t, e, x1).residual, f2 = solveTail(t, e, x2).residual;
    for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = solveTail(t, e, x1).residual;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = solveTail(t, e, x2).residual;
        }
    }
    const double beta = 0.5 * (lo + hi);
    const TailFit fit = solveTail(t, e, beta);
    AlgebraicExtrapolation out;
    out.limit = fit.limit;
    out.coefficient = fit.coefficient;
    out.order = beta;
    out.rmsResidual = fit.residual / std::sqrt(double(t.size()));
    return out;
}

std::vector<double> logspace(double a, double b, int n)
{
    if (n < 1 || !(a > 0) || !(b > 0)) throw FitError("logspace needs positive bounds and n >= 1");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) out[i] = std::exp(la + (lb - la) * i / (n - 1));
    out.front() = a;
    out.back() = b;
    return out;
}

}  // namespace semilin
