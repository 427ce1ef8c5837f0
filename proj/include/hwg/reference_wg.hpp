// Coupled (non-hybridized) weak Galerkin mixed solver with single-valued
// edge fluxes, used as a brute-force oracle on small meshes. Assembly is
// independent of the hybrid path; only bases and quadrature are shared.

#ifndef HWG_REFERENCE_WG_HPP
#define HWG_REFERENCE_WG_HPP

#include <vector>

#include <Eigen/Dense>

#include "hwg/hybrid_solver.hpp"
#include "hwg/mesh.hpp"
#include "hwg/problems.hpp"

namespace hwg {

struct CoupledSolution {
  int k = 0;
  std::vector<Eigen::VectorXd> q0;    // per cell
  std::vector<Eigen::VectorXd> qb;    // per edge, single-valued normal flux
                                      // w.r.t. the edge's canonical normal
  std::vector<Eigen::VectorXd> u;     // per cell, P_{k+1}
};

/// Dense saddle solve of the coupled scheme. Guarded at 20000 total DOFs.
CoupledSolution solve_coupled(const PolygonalMesh& mesh, const ProblemSpec& spec, int k);

struct EquivalenceReport {
  double max_q0_diff = 0.0;       // relative
  double max_u_diff = 0.0;        // relative
  double max_qb_diff = 0.0;       // relative
  double max_hybrid_qb_jump = 0.0;  // two-sided consistency of the hybrid flux
  bool pass(double tol = 1e-9) const {
    return max_q0_diff <= tol && max_u_diff <= tol && max_qb_diff <= tol;
  }
};

/// Solves both formulations and reports the worst coefficient discrepancy.
EquivalenceReport compare_hybrid_vs_coupled(const PolygonalMesh& mesh, const ProblemSpec& spec,
                                            int k);

}  // namespace hwg

#endif
