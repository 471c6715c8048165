#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "semilin/inverse.hpp"

namespace semilin {

enum class AssumptionKind { A, B, C, D };

std::string assumptionName(AssumptionKind kind);

/// One tested quantity. Content gaps at a vertex of layer l are
/// P_(l-1)(u) - P_l(u), with P_0(u) = lambda u the background and P_l the
/// layer-l polynomial; products are prod_(i<j) (u_j - u_i) over the layer's
/// measurements; apex values are u itself.
struct TestedQuantity {
    enum class Type { contentGap, distinctness, apexValue, exteriorGap };
    Type type = Type::contentGap;
    int layer = 1;   // 1-based; 0 for exterior nodes
    int vertex = -1; // vertex index in the layer polygon; -1 for exterior nodes
    Vec2 point = Vec2::Zero();
    std::vector<int> measurements;  // indices into the config's measurement list
    cplx value;          // on the refined mesh
    double error = 0.0;  // |q_h - q_(h/2)|
    double tolerance = 0.0;
    bool pass = false;
    std::string describe() const;
};

struct AdmissibilityReport {
    AssumptionKind kind = AssumptionKind::A;
    std::vector<TestedQuantity> quantities;
    double tolerance = 0.0;    // largest per-quantity tolerance
    double worstMargin = 0.0;  // smallest |value| among the quantities that decide the result
    bool pass = false;
    std::string note;
    /// Columns: type, layer, vertex, x, y, re, im, modulus, tolerance, pass.
    void writeCsv(std::ostream& os) const;
};

struct AdmissibilityConfig {
    ConvexPolygon domain;
    std::vector<ConvexPolygon> layers;  // outermost first
    ContentModel content;
    std::vector<BoundaryFunction> measurements;
    /// 1-based layer each measurement belongs to (Assumption C); empty means
    /// every measurement is tested at every layer.
    std::vector<int> measurementLayer;
    double hMesh = 0.05;
    NewtonOptions newton;
    /// A quantity passes when |q| > toleranceFactor * |q_h - q_(h/2)|.
    double toleranceFactor = 10.0;
};

/// A: one layer, one measurement; passes when every vertex gap is nonzero or,
/// failing that, when lambda u - f(u) is nonzero at every exterior node.
/// B: one layer, N measurements; vertex gaps and the distinctness product.
/// C: class A nest; layer-l gaps and products with that layer's measurements.
/// D: class B nest, one measurement; layer gaps and nonzero apex values.
/// Vertices must be mesh nodes, which holds for meshes conforming to the layers.
AdmissibilityReport checkAssumption(AssumptionKind kind, const AdmissibilityConfig& config);

/// Plane-wave data psi_j = eps m_j exp(i k d.x) with k = k0 eps^zeta0 and the
/// linear coefficient of layer l equal to c_l eps^zeta_l (higher powers fixed).
struct PlaneWaveScaling {
    double k0 = 1.0;
    double zeta0 = 0.5;
    Vec2 direction = Vec2(1.0, 0.0);
    std::vector<double> layerZeta;  // per layer; empty means 0.5 everywhere, NaN leaves a layer unscaled
    std::vector<double> multipliers{1.0};  // amplitude factors m_j
};

/// Content and data of the scaled family at one eps.
ContentModel scaledContent(const ContentModel& base, const PlaneWaveScaling& s, double eps);
std::vector<BoundaryFunction> scaledMeasurements(const PlaneWaveScaling& s, double eps);

struct LeadingOrderRow {
    TestedQuantity quantity;
    double eps = 0.0;
    cplx leading;        // analytic leading term
    double ratio = 0.0;  // |value| / |leading|
};

struct LeadingOrderReport {
    AssumptionKind kind = AssumptionKind::A;
    std::vector<LeadingOrderRow> rows;
    double minRatio = 0.0, maxRatio = 0.0;  // over the rows at the smallest eps
    /// Columns: eps, type, layer, vertex, modulus, leading, ratio.
    void writeCsv(std::ostream& os) const;
};

/// For each eps: build the scaled family, evaluate the assumption's quantities
/// and divide by the leading terms (c_(l-1) - c_l) psi_j(x_c) for gaps,
/// prod (eps_j - eps_i) exp(i k d.x_c) for products and psi(x_c) for apex values.
LeadingOrderReport leadingOrderRatios(AssumptionKind kind, const AdmissibilityConfig& geometry,
                                      const PlaneWaveScaling& scaling, const std::vector<double>& epsGrid);

struct ExpansionRow {
    double eps = 0.0;
    double k = 0.0;
    double vNorm = 0.0;  // H1 norm of u_h - I_h psi
    double ratio = 0.0;  // vNorm / eps
    int iterations = 0;
};

struct ExpansionReport {
    std::vector<ExpansionRow> rows;  // in grid order
    double slope = 0.0;              // log-log slope of vNorm against eps (eps > 0)
    bool monotone = false;           // vNorm / eps strictly decreasing as eps decreases
    bool pass = false;               // monotone and slope > slopeThreshold
    double slopeThreshold = 1.0;
    /// Columns: eps, v_norm, ratio.
    void writeCsv(std::ostream& os) const;
};

struct SmallDataConfig {
    ConvexPolygon domain;
    std::vector<ConvexPolygon> layers;
    ContentModel content;  // linear coefficients are the c_l of the scaling
    PlaneWaveScaling scaling;
    double hMesh = 0.05;
    NewtonOptions newton;
    double slopeThreshold = 1.0;
};

/// Solves with psi = eps exp(i k d.x) on the grid and reports |v| = |u - psi|.
ExpansionReport smallDataExpansion(const SmallDataConfig& config, const std::vector<double>& epsGrid);

/// The same for a nest; checks the class rules of `contentClass` first.
ExpansionReport nestSmallDataExpansion(const SmallDataConfig& config, ContentClass contentClass,
                                       const std::vector<double>& epsGrid);

}  // namespace semilin
