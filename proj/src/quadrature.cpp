#include "semilin/quadrature.hpp"

#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "semilin/errors.hpp"

namespace semilin {

namespace {

// Kronrod 15-point abscissae (positive half) and weights; the Gauss 7-point
// rule uses every other abscissa.
constexpr double kXk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    cplx value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment rule(const std::function<cplx(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const cplx fc = f(c);
    cplx k = fc * kWk[7];
    cplx g = fc * kWg[3];
    for (int i = 0; i < 7; ++i) {
        const cplx s = f(c - h * kXk[i]) + f(c + h * kXk[i]);
        k += kWk[i] * s;
        if (i % 2 == 1) g += kWg[i / 2] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

QuadratureResult integrate(const std::function<cplx(double)>& f, double a, double b, const QuadratureOptions& opt)
{
    QuadratureResult res;
    if (a == b) return res;
    std::priority_queue<Segment> queue;
    Segment first = rule(f, a, b);
    res.evaluations = 15;
    cplx total = first.value;
    double err = first.error;
    queue.push(first);
    int segments = 1;
    while (err > std::max(opt.absTol, opt.relTol * std::abs(total))) {
        if (segments >= opt.maxSegments) {
            std::ostringstream msg;
            msg << "adaptive quadrature did not reach tolerance: estimate " << err << " after " << segments
                << " segments";
            throw QuadratureError(msg.str());
        }
        const Segment s = queue.top();
        queue.pop();
        const double m = 0.5 * (s.a + s.b);
        const Segment l = rule(f, s.a, m), r = rule(f, m, s.b);
        res.evaluations += 30;
        total += l.value + r.value - s.value;
        err += l.error + r.error - s.error;
        queue.push(l);
        queue.push(r);
        ++segments;
        // Cheap running sums drift; recompute now and then.
        if (segments % 64 == 0) {
            auto copy = queue;
            total = 0;
            err = 0;
            while (!copy.empty()) {
                total += copy.top().value;
                err += copy.top().error;
                copy.pop();
            }
        }
    }
    res.value = total;
    res.errorEstimate = err;
    return res;
}

QuadratureResult integrateToInfinity(const std::function<cplx(double)>& f, double a, const QuadratureOptions& opt)
{
    auto g = [&](double t) -> cplx {
        if (t >= 1.0) return 0.0;
        const double s = 1.0 - t;
        const cplx v = f(a + t / s);
        return v == cplx(0.0) ? cplx(0.0) : v / (s * s);
    };
    return integrate(g, 0.0, 1.0, opt);
}

QuadratureResult integrate2D(const std::function<cplx(double, double)>& f, double a0, double b0,
                             const std::function<double(double)>& a1, const std::function<double(double)>& b1,
                             const QuadratureOptions& opt)
{
    QuadratureOptions inner = opt;
    inner.absTol *= 0.1;
    inner.relTol *= 0.1;
    int evaluations = 0;
    auto outer = [&](double x) -> cplx {
        auto r = integrate([&](double y) { return f(x, y); }, a1(x), b1(x), inner);
        evaluations += r.evaluations;
        return r.value;
    };
    QuadratureResult res = integrate(outer, a0, b0, opt);
    res.evaluations = evaluations;
    return res;
}

cplx kronrod15(const std::function<cplx(double)>& f, double a, double b) { return rule(f, a, b).value; }

const std::array<TrianglePoint, 6>& triangleRule()
{
    static const std::array<TrianglePoint, 6> pts = [] {
        const double a = 0.44594849091596488632, wa = 0.22338158967801146570;
        const double b = 0.091576213509770743460, wb = 0.10995174365532186764;
        return std::array<TrianglePoint, 6>{{{a, a, 1 - 2 * a, wa},
                                             {a, 1 - 2 * a, a, wa},
                                             {1 - 2 * a, a, a, wa},
                                             {b, b, 1 - 2 * b, wb},
                                             {b, 1 - 2 * b, b, wb},
                                             {1 - 2 * b, b, b, wb}}};
    }();
    return pts;
}

}  // namespace semilin
