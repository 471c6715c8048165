#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "semilin/mesh.hpp"

namespace semilin {

enum class ContentClass { singleLayer, classA, classB };

/// Semilinear content a(x, u): backgroundLambda*u in region 0 and
/// sum_j layers[l-1][j-1] * u^j in region l >= 1. An optional forcing term
/// s(x) is added everywhere (manufactured solutions only; it breaks a(x,0)=0).
struct ContentModel {
    cplx backgroundLambda = 0.0;
    std::vector<std::vector<cplx>> layers;
    ContentClass classTag = ContentClass::singleLayer;
    std::function<cplx(const Vec2&)> forcing;

    /// Throws ConfigError when the class rules are violated: adjacent class-A
    /// layers with identical coefficient vectors, class-B outer layers that are
    /// not linear or with equal neighbouring coefficients.
    void validate() const;
    /// Throws ConfigError when the mesh carries a region without coefficients.
    void checkRegions(const TriMesh& mesh) const;

    cplx a(int region, cplx u) const;
    cplx da(int region, cplx u) const;  // derivative in u
};

using SparseC = Eigen::SparseMatrix<cplx>;
using VecC = Eigen::VectorXcd;

/// Finite element solution on a mesh, with the content it solves.
struct FemField {
    std::shared_ptr<const TriMesh> mesh;
    VecC values;
    std::shared_ptr<const ContentModel> content;
    int newtonIterations = 0;
    std::vector<double> residualHistory;

    /// Values at the boundary nodes in loop order.
    VecC boundaryTrace() const;
    /// Linear interpolation at p; throws MeshError outside the mesh.
    cplx evaluate(const Vec2& p) const;
};

/// Dirichlet / Neumann pair on the outer boundary (nodes in loop order).
struct CauchyData {
    std::vector<int> nodes;
    std::vector<Vec2> coords;
    VecC psi;
    VecC dnu;
    VecC weights;  // lumped boundary measure of each node's hat function
    double meshSize = 0.0;

    void validate() const;
    /// Columns: node, x, y, Re psi, Im psi, Re dnu, Im dnu.
    void writeCsv(std::ostream& os) const;
};

struct LinearizedSystem {
    SparseC full;     // K - M[da(x, u)] over all nodes
    SparseC reduced;  // interior rows and columns
    std::vector<int> interior;  // reduced index -> node
    std::vector<int> reducedIndex;  // node -> reduced index or -1
};

SparseC assembleStiffness(const TriMesh& mesh);
/// Mass matrix weighted by a per-region coefficient (1 everywhere by default).
SparseC assembleMass(const TriMesh& mesh, const std::vector<cplx>& regionCoefficient = {});
/// Boundary mass over the outer boundary edges.
SparseC assembleBoundaryMass(const TriMesh& mesh);

/// Jacobian of v -> Delta v + da(x, u) v in weak form (stiffness minus the
/// weighted mass), with Dirichlet rows eliminated in `reduced`.
LinearizedSystem assembleLinearized(const TriMesh& mesh, const ContentModel& content, const VecC& uCurrent);

/// Weak residual r_i = int grad u . grad phi_i - int a(x,u) phi_i over all nodes.
VecC weakResidual(const TriMesh& mesh, const ContentModel& content, const VecC& u);

struct NewtonOptions {
    double tol = 1e-10;  // Euclidean norm of the interior weak residual
    int maxIter = 25;
    double smallnessDelta = std::numeric_limits<double>::infinity();  // bound on the boundary norm of psi
};

/// Newton iteration started from the solve linearized at u = 0. Throws
/// SmallnessError, SingularSystemError or NewtonDivergenceError.
FemField solveSemilinear(std::shared_ptr<const TriMesh> mesh, const ContentModel& content, const VecC& psi,
                         const NewtonOptions& opt = {});

/// Boundary values of a function at the boundary nodes in loop order.
VecC boundaryValues(const TriMesh& mesh, const std::function<cplx(const Vec2&)>& f);

/// Neumann trace from the weak residual at boundary nodes divided by the
/// lumped boundary measure (exact for linear fields on straight sides).
CauchyData dirichletToNeumann(const FemField& field);

/// sqrt(Re(u^H M u + u^H K u)).
double h1Norm(const TriMesh& mesh, const VecC& u);
/// Boundary norms of data given at the boundary nodes in loop order.
double boundaryL2Norm(const TriMesh& mesh, const VecC& psi);
/// sqrt(|psi|_L2^2 + |psi|_L2 * |psi|_H1) with the tangential difference
/// seminorm; stands in for the trace-space norm.
double boundaryHalfNorm(const TriMesh& mesh, const VecC& psi);

struct SmallDataRow {
    double eps;
    double uNorm;
    double psiNorm;
    double ratio;  // uNorm / psiNorm
    int iterations;
};

struct SmallDataReport {
    std::vector<SmallDataRow> rows;
    double spread = 0.0;  // max ratio / min ratio
    bool pass = false;
};

SmallDataReport smallDataBound(std::shared_ptr<const TriMesh> mesh, const ContentModel& content, const VecC& psi0,
                               const std::vector<double>& epsList, double factor = 2.0,
                               const NewtonOptions& opt = {});

}  // namespace semilin
