#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "semilin/forward.hpp"
#include "semilin/mesh.hpp"

using namespace semilin;

namespace {

std::shared_ptr<const TriMesh> unitSquare(double h, const std::vector<ConvexPolygon>& layers = {})
{
    return std::make_shared<const TriMesh>(triangulate(ConvexPolygon::rectangle(0, 0, 1, 1), layers, h));
}

}  // namespace

TEST_CASE("P1 reproduces a linear harmonic function and its normal derivative")
{
    auto m = unitSquare(0.1);
    ContentModel c;
    auto exact = [](const Vec2& x) { return cplx(x.x() + 2.0 * x.y()); };
    const FemField f = solveSemilinear(m, c, boundaryValues(*m, exact));
    for (std::size_t i = 0; i < m->nodes.size(); ++i) CHECK(std::abs(f.values[i] - exact(m->nodes[i])) < 1e-10);
    const CauchyData d = dirichletToNeumann(f);
    for (std::size_t k = 0; k < d.nodes.size(); ++k) {
        const Vec2& x = d.coords[k];
        const bool corner = (x.x() < 1e-12 || x.x() > 1 - 1e-12) && (x.y() < 1e-12 || x.y() > 1 - 1e-12);
        if (corner) continue;
        double expected = 0.0;
        if (x.x() > 1 - 1e-12) expected = 1.0;
        else if (x.x() < 1e-12) expected = -1.0;
        else if (x.y() > 1 - 1e-12) expected = 2.0;
        else expected = -2.0;
        CHECK(std::abs(d.dnu[k] - expected) < 1e-9);
    }
}

TEST_CASE("Helmholtz plane wave converges at second order")
{
    ContentModel c;
    c.backgroundLambda = 4.0;
    const Vec2 d(std::sqrt(0.5), std::sqrt(0.5));
    auto exact = [d](const Vec2& x) { return std::exp(cplx(0.0, 2.0 * d.dot(x))); };
    std::vector<double> hs, errs;
    for (double h : {0.1, 0.05, 0.025}) {
        auto m = unitSquare(h);
        const FemField f = solveSemilinear(m, c, boundaryValues(*m, exact));
        double e = 0.0;
        for (std::size_t i = 0; i < m->nodes.size(); ++i) e = std::max(e, std::abs(f.values[i] - exact(m->nodes[i])));
        hs.push_back(h);
        errs.push_back(e);
    }
    CHECK(oracle::logSlope(hs, errs) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("Newton converges quadratically on a semilinear inclusion")
{
    const ConvexPolygon tri({Vec2(0.3, 0.3), Vec2(0.7, 0.35), Vec2(0.45, 0.7)});
    auto m = unitSquare(0.05, {tri});
    ContentModel c;
    c.backgroundLambda = 4.0;
    c.layers = {{-30.0, 2.0}};
    const Vec2 d(1.0, 0.0);
    NewtonOptions o;
    o.tol = 1e-12;
    const FemField f = solveSemilinear(m, c, boundaryValues(*m, [d](const Vec2& x) { return std::exp(cplx(0, 2 * d.dot(x))); }), o);
    const auto& r = f.residualHistory;
    REQUIRE(r.size() >= 3);
    CHECK(r.back() <= 1e-12);
    // Quadratic convergence: each step at least squares the relative residual.
    for (std::size_t k = 2; k + 1 < r.size(); ++k)
        if (r[k] > 1e-13) CHECK(r[k + 1] / r[0] <= 10.0 * std::pow(r[k] / r[0], 1.8));
    const VecC res = weakResidual(*m, c, f.values);
    double worst = 0.0;
    std::vector<bool> boundary(m->nodes.size(), false);
    for (int b : m->boundaryNodes()) boundary[static_cast<std::size_t>(b)] = true;
    for (Eigen::Index i = 0; i < res.size(); ++i)
        if (!boundary[static_cast<std::size_t>(i)]) worst = std::max(worst, std::abs(res[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("zero data gives the zero solution without Newton steps")
{
    auto m = unitSquare(0.1);
    ContentModel c;
    c.backgroundLambda = 4.0;
    const FemField f = solveSemilinear(m, c, VecC::Zero(static_cast<Eigen::Index>(m->boundaryNodes().size())));
    CHECK(f.newtonIterations == 0);
    CHECK(f.values.norm() == 0.0);
}

TEST_CASE("content model evaluates the layer polynomial")
{
    ContentModel c;
    c.backgroundLambda = 3.0;
    c.layers = {{-2.0, 0.5}};
    const cplx u(0.4, -0.2);
    CHECK(std::abs(c.a(0, u) - 3.0 * u) < 1e-15);
    CHECK(std::abs(c.a(1, u) - (-2.0 * u + 0.5 * u * u)) < 1e-15);
    CHECK(std::abs(c.da(1, u) - (-2.0 + u)) < 1e-15);
}
