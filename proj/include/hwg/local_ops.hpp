// Element-local machinery: L2 projections, discrete weak divergence,
// stabilizer, bilinear forms, the local saddle solve, the trace lifting and
// the local Schur block.
//
// DOF layout on an element of order k with m edges:
//   q-DOFs:  [ Pk x-component | Pk y-component | edge 0 qb | ... | edge m-1 qb ]
//   u-DOFs:  P_{k+1} coefficients.
// qb stores the scalar normal component relative to the owning cell's
// outward normal, expanded in the edge's canonical basis; the multiplier on
// an edge uses the same basis, so the trace coupling per edge is the plain
// edge mass matrix.

#ifndef HWG_LOCAL_OPS_HPP
#define HWG_LOCAL_OPS_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hwg/basis.hpp"
#include "hwg/mesh.hpp"
#include "hwg/problems.hpp"
#include "hwg/quadrature.hpp"

namespace hwg {

/// Weak vector function on one element: interior field plus per-edge scalar
/// normal components.
struct WeakVector {
  Eigen::VectorXd q0;                // 2 * dim P_k
  std::vector<Eigen::VectorXd> qb;   // per local edge, k+1 coefficients
};

/// Bases and quadrature for one element, shared by all local assembly.
/// `extra_degree` raises every rule above the defaults (cell 2(k+1)+2,
/// edge 2k+2).
struct ElementContext {
  ElementContext(const PolygonalMesh& mesh, int cell, int k, int extra_degree = 0);

  const PolygonalMesh* mesh;
  int cell;
  int k;
  CellBasis pk;
  CellBasis pk1;
  std::vector<EdgeBasis> edge_basis;       // canonical per global edge
  QuadratureRule cell_quad;
  std::vector<QuadratureRule> edge_quad;

  int n_edges() const { return static_cast<int>(edge_basis.size()); }
  int dim_pk() const { return pk.dim(); }
  int dim_pk1() const { return pk1.dim(); }
  int nq0() const { return 2 * pk.dim(); }
  int nq() const { return nq0() + n_edges() * (k + 1); }
  int nu() const { return pk1.dim(); }
  int nlam() const { return n_edges() * (k + 1); }
  int qb_offset(int local_edge) const { return nq0() + local_edge * (k + 1); }

  const CellGeometry& geom() const { return mesh->geometry(cell); }
};

// --- projections -----------------------------------------------------------

/// L2 projection of a scalar function onto P_m(T). The default quadrature
/// (degree 2m+14) is effectively exact for smooth data; pass `extra_degree`
/// relative to 2m+2 to control it.
Eigen::VectorXd project_cell_scalar(const PolygonalMesh& mesh, int cell,
                                    const std::function<double(const Vec2&)>& w,
                                    int order, int extra_degree = 12);

/// Componentwise L2 projection onto [P_k(T)]^2 (x-block then y-block).
Eigen::VectorXd project_cell_vector(const PolygonalMesh& mesh, int cell,
                                    const std::function<Vec2(const Vec2&)>& v,
                                    int order, int extra_degree = 12);

/// L2 projection onto P_k(e) in the edge's canonical basis.
Eigen::VectorXd project_edge(const PolygonalMesh& mesh, int edge,
                             const std::function<double(const Vec2&)>& w,
                             int order, int extra_degree = 12);

/// Embeds a smooth vector field: cell projection of the field plus edge
/// projections of its normal component w.r.t. the cell's outward normals.
WeakVector embed(const ElementContext& ctx, const std::function<Vec2(const Vec2&)>& p);

// --- local operators and forms ---------------------------------------------

/// Discrete weak divergence in P_{k+1}(T) of a weak vector.
Eigen::VectorXd weak_divergence(const ElementContext& ctx, const WeakVector& v);

/// Stabilizer s_T as a symmetric PSD matrix on the q-DOFs:
///   s_T(r, v) = h_T sum_e int_e (r0.n - rb)(v0.n - vb).
Eigen::MatrixXd stabilizer_matrix(const ElementContext& ctx);

/// Alpha-weighted vector mass matrix on the q0 DOFs.
Eigen::MatrixXd form_a(const ElementContext& ctx,
                       const std::function<Eigen::Matrix2d(const Vec2&)>& alpha);

/// b_T(v, w) assembled from the defining identity, rows = P_{k+1} test
/// functions, columns = q-DOFs.
Eigen::MatrixXd form_b(const ElementContext& ctx);

/// Trace coupling c_T(v, sigma), rows = q-DOFs, columns = per-edge
/// multiplier modes (nonzero only on qb rows).
Eigen::MatrixXd form_c(const ElementContext& ctx);

// --- local system -----------------------------------------------------------

/// Factorized element saddle system with lifting, Schur block, and load
/// maps. Immutable after construction.
struct LocalSystem {
  int cell = -1;
  int k = 0;
  int nq = 0, nu = 0, nlam = 0;

  Eigen::PartialPivLU<Eigen::MatrixXd> factorization;  // of [[A_s, -B^T],[B, 0]]
  Eigen::MatrixXd B;          // nu x nq divergence coupling
  Eigen::MatrixXd C;          // nq x nlam trace coupling
  Eigen::MatrixXd lifting;    // (nq+nu) x nlam: trace DOFs -> (q, u)
  Eigen::MatrixXd schur;      // nlam x nlam, symmetric PSD
  Eigen::VectorXd f_moments;  // nu
  Eigen::VectorXd particular; // nq+nu: solution with zero trace data
  Eigen::VectorXd rhs_trace;  // nlam: contribution to the reduced rhs

  Eigen::Block<const Eigen::MatrixXd> lifting_q() const { return lifting.topRows(nq); }
  Eigen::Block<const Eigen::MatrixXd> lifting_u() const { return lifting.bottomRows(nu); }

  /// Solves the local system for given per-edge multiplier coefficients
  /// (stacked in local edge order); returns the (q, u) coefficient vector.
  Eigen::VectorXd recover(const Eigen::VectorXd& lambda_local) const;
};

LocalSystem build_local_system(const ElementContext& ctx, const ProblemSpec& spec);
LocalSystem build_local_system(const PolygonalMesh& mesh, int cell, const ProblemSpec& spec, int k);

}  // namespace hwg

#endif
