#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "semilin/forward.hpp"

namespace semilin {

using BoundaryFunction = std::function<cplx(const Vec2&)>;

/// One boundary measurement: the Dirichlet data as a function and the
/// measured Cauchy data (possibly on a different boundary discretization).
struct Measurement {
    std::string label;
    BoundaryFunction psi;
    CauchyData data;
};

struct RecoveryProblem {
    ConvexPolygon domain;
    std::vector<Measurement> measurements;
    double hMesh = 0.05;  // inversion mesh size
    NewtonOptions newton;
    /// Throws ConfigError without measurements or with a non-positive mesh size.
    void validate() const;
};

/// ||dnu_a - dnu_b|| / ||psi|| in the lumped boundary L2 norm (absolute when
/// psi = 0). Requires the same boundary nodes and identical Dirichlet traces;
/// throws SolverError otherwise.
double cauchyGap(const CauchyData& a, const CauchyData& b);

/// Linear interpolation of `source` along the boundary onto the boundary
/// nodes of `target`. Throws SolverError when a target node is off the
/// source boundary.
CauchyData resampleCauchyData(const CauchyData& source, const TriMesh& target);

/// Cauchy data of one forward solve on a mesh conforming to the nest.
CauchyData synthesizeCauchyData(const ConvexPolygon& domain, const std::vector<ConvexPolygon>& nest,
                                const ContentModel& content, const BoundaryFunction& psi, double hMesh,
                                const NewtonOptions& newton = {});

/// Forward model used by the inversions: one interface-free mesh of the
/// domain, with inclusions entering through cut-cell region fractions so
/// that the data depend continuously on the vertex positions.
class CutCellSimulator {
public:
    CutCellSimulator(const ConvexPolygon& domain, double hMesh, NewtonOptions newton = {});
    const TriMesh& mesh() const { return *base_; }
    CauchyData simulate(const std::vector<ConvexPolygon>& nest, const ContentModel& content,
                        const BoundaryFunction& psi) const;
    /// sqrt(sum_j cauchyGap_j^2) against the problem's measurements.
    double misfit(const RecoveryProblem& problem, const std::vector<ConvexPolygon>& nest,
                  const ContentModel& content) const;
    /// Per-node weighted Neumann differences, real and imaginary parts stacked,
    /// whose Euclidean norm is the misfit.
    Eigen::VectorXd residual(const RecoveryProblem& problem, const std::vector<ConvexPolygon>& nest,
                             const ContentModel& content) const;

private:
    std::shared_ptr<const TriMesh> base_;
    NewtonOptions newton_;
};

/// Moves vertices inside `container` (at least `margin` from its boundary),
/// orders them by angle, and replaces vertices that are not strictly convex by
/// points on a slight outward arc over the hull edge they fall behind. The
/// vertex count is preserved.
ConvexPolygon repairConvexity(const std::vector<Vec2>& points, const ConvexPolygon& container, double margin);

struct ShapeRecoveryOptions {
    int maxEvaluations = 3000;
    double initialStep = 0.05;  // simplex edge in coordinate units
    double sizeTol = 1e-5;      // simplex size at which a run stops
    int restarts = 2;
    double misfitTol = 2e-2;    // a final misfit above this throws RecoveryError
    double flatTol = 1e-6;      // largest misfit change under hMesh vertex moves that counts as flat
};

struct ShapeRecoveryResult {
    ConvexPolygon shape;
    double misfit = 0.0;
    std::vector<double> history;  // best misfit after each simplex iteration
    int evaluations = 0;
    double sensitivity = 0.0;     // largest misfit change under hMesh vertex moves
    bool flatLandscape = false;
    std::string diagnostics;
};

/// Nelder-Mead over the 2V vertex coordinates of a single inclusion with known
/// content, minimizing the misfit of the problem's measurements.
ShapeRecoveryResult recoverConvexPolygon(const RecoveryProblem& problem, const ConvexPolygon& initial,
                                         const ContentModel& content, const ShapeRecoveryOptions& opt = {});

struct VandermondeSolution {
    std::vector<cplx> coefficients;
    double conditionNumber = 0.0;
};

/// Solves sum_j c_j u_i^j = g_i (j = 1..N) for the coefficients. Throws
/// SingularSystemError naming the vanishing factor when an apex value is zero
/// or two apex values coincide.
VandermondeSolution recoverCoefficients(const std::vector<cplx>& apexValues, const std::vector<cplx>& gapValues);
/// g_i = sum_j c_j u_i^j.
std::vector<cplx> forwardVandermonde(const std::vector<cplx>& apexValues, const std::vector<cplx>& coefficients);

/// Unknown coefficient: layers[layer - 1][power - 1] of a ContentModel.
struct CoefficientSlot {
    int layer = 1;
    int power = 1;
};

struct CoefficientFitOptions {
    int maxIterations = 50;
    double fdStep = 1e-6;
    bool complexCoefficients = false;  // fit imaginary parts too
    double rankTol = 1e-10;            // singular value ratio below which the Jacobian is rank deficient
};

struct CoefficientFit {
    ContentModel content;
    std::vector<cplx> coefficients;  // slot order
    double misfit = 0.0;
    int iterations = 0;
    double jacobianCondition = 0.0;
    bool rankDeficient = false;
    std::string diagnostics;
};

/// Gauss-Newton (trust-region Levenberg-Marquardt with a finite-difference
/// Jacobian) over the slots with the nest fixed, on a mesh conforming to it.
CoefficientFit recoverCoefficientsFromBoundary(const RecoveryProblem& problem, const std::vector<ConvexPolygon>& nest,
                                               const ContentModel& initial, const std::vector<CoefficientSlot>& slots,
                                               const CoefficientFitOptions& opt = {});

struct NestHypothesis {
    ContentClass contentClass = ContentClass::classB;
    std::vector<ConvexPolygon> initialLayers;  // outermost first
    ContentModel initialContent;
    std::vector<CoefficientSlot> slots;  // unknown coefficients
};

struct NestRecoveryOptions {
    ShapeRecoveryOptions shape;
    CoefficientFitOptions coefficients;
    int refinementIterations = 60;
    double misfitTol = 2e-2;
    /// Vary each layer only by translation, scaling and rotation of its
    /// initial polygon (4 parameters) instead of moving vertices freely.
    bool similarityShapes = false;
};

struct NestStage {
    std::string name;
    double misfit = 0.0;
    double seconds = 0.0;
};

struct NestRecoveryResult {
    std::vector<ConvexPolygon> layers;
    ContentModel content;
    double misfit = 0.0;
    std::vector<NestStage> stages;
};

/// Layer peeling: for l = 1..N fit polygon l and the slots of layer l with the
/// outer polygons frozen and the deeper layers held at their current estimates,
/// then refine all polygons and slots jointly. Throws RecoveryError listing the completed
/// layers when a stage fails.
NestRecoveryResult recoverNest(const RecoveryProblem& problem, const NestHypothesis& hypothesis,
                               const NestRecoveryOptions& opt = {});

}  // namespace semilin
