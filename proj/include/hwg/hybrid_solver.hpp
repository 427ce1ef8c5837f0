// Global pipeline: multiplier DOF numbering, Schur assembly with Dirichlet
// elimination, the SPD skeleton solve, and element-local recovery.

#ifndef HWG_HYBRID_SOLVER_HPP
#define HWG_HYBRID_SOLVER_HPP

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hwg/local_ops.hpp"
#include "hwg/mesh.hpp"
#include "hwg/problems.hpp"

namespace hwg {

/// Reduced SPD system on the skeleton multiplier DOFs. Global DOF for
/// (edge e, mode j) is e*(k+1)+j; boundary-edge DOFs are constrained to the
/// edge projection of g and eliminated.
struct SchurSystem {
  int k = 0;
  int n_dofs = 0;            // all multiplier DOFs
  int n_free = 0;
  std::vector<int> free_index;       // per DOF: index into the free system, or -1
  Eigen::SparseMatrix<double> matrix;  // n_free x n_free, symmetric
  Eigen::VectorXd rhs;                 // n_free
  Eigen::VectorXd constrained_values;  // per DOF; zero on free DOFs
  std::vector<LocalSystem> local;      // per cell, reused for recovery
};

struct SolverDiagnostics {
  int n_free_dofs = 0;
  double relative_residual = 0.0;
  bool used_iterative = false;
  int iterations = 0;
  double assemble_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct WGSolution {
  int k = 0;
  std::vector<Eigen::VectorXd> q0;                 // per cell
  std::vector<std::vector<Eigen::VectorXd>> qb;    // per cell, per local edge
  std::vector<Eigen::VectorXd> u;                  // per cell, P_{k+1}
  std::vector<Eigen::VectorXd> lambda;             // per edge, k+1
  SolverDiagnostics diagnostics;
};

/// Builds every local system and scatters the Schur blocks and reduced rhs.
/// `threads` > 1 parallelizes the element loop.
SchurSystem assemble_schur(const PolygonalMesh& mesh, const ProblemSpec& spec, int k,
                           int threads = 1);

/// Solves the free DOFs (sparse LDLT up to 200k DOFs, then Jacobi-CG) and
/// returns the full multiplier vector, constrained DOFs included.
Eigen::VectorXd solve_schur(const SchurSystem& sys, SolverDiagnostics* diag = nullptr);

/// Per-element back substitution for a known multiplier.
WGSolution recover_local(const PolygonalMesh& mesh, const SchurSystem& sys,
                         const Eigen::VectorXd& lambda, int threads = 1);

/// Full pipeline; checks element-wise conservation of the recovered flux.
WGSolution solve_hwg(const PolygonalMesh& mesh, const ProblemSpec& spec, int k,
                     int threads = 1);

/// Max edge-L2 norm of the flux jump over interior edges (zero for a
/// converged solve).
double max_flux_jump(const PolygonalMesh& mesh, const WGSolution& sol);

}  // namespace hwg

#endif
