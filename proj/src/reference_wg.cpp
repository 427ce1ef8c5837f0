#include "hwg/reference_wg.hpp"

#include <cmath>
#include <stdexcept>

#include "hwg/basis.hpp"
#include "hwg/quadrature.hpp"

namespace hwg {

namespace {

// Deliberately self-contained element assembly; only bases and quadrature
// are shared with the production path.
struct CoupledElement {
  Eigen::MatrixXd As;  // a + s on (q0, per-edge flux) DOFs, owning-normal convention
  Eigen::MatrixXd B;   // divergence coupling, rows = P_{k+1} tests
};

CoupledElement assemble_element(const PolygonalMesh& mesh, int cell, const ProblemSpec& spec,
                                int k) {
  const CellBasis pk(mesh, cell, k);
  const CellBasis pk1(mesh, cell, k + 1);
  const QuadratureRule cq = cell_quadrature(mesh, cell, 2 * (k + 1) + 2);
  const auto& geom = mesh.geometry(cell);
  const auto& edges = mesh.cell_edges()[cell];
  const int ne = static_cast<int>(edges.size());
  const int d = pk.dim();
  const int nq = 2 * d + ne * (k + 1);
  const int nu = pk1.dim();

  CoupledElement el;
  el.As = Eigen::MatrixXd::Zero(nq, nq);
  el.B = Eigen::MatrixXd::Zero(nu, nq);

  for (int p = 0; p < cq.size(); ++p) {
    const Eigen::Matrix2d al = spec.alpha(cq.points[p]);
    Eigen::VectorXd vals(d);
    for (int i = 0; i < d; ++i) vals[i] = pk.eval(i, cq.points[p]);
    const Eigen::MatrixXd outer = cq.weights[p] * (vals * vals.transpose());
    el.As.block(0, 0, d, d) += al(0, 0) * outer;
    el.As.block(0, d, d, d) += al(0, 1) * outer;
    el.As.block(d, 0, d, d) += al(1, 0) * outer;
    el.As.block(d, d, d, d) += al(1, 1) * outer;
    for (int i = 0; i < nu; ++i) {
      const Vec2 g = pk1.grad(i, cq.points[p]);
      for (int j = 0; j < d; ++j) {
        el.B(i, j) -= cq.weights[p] * vals[j] * g.x();
        el.B(i, d + j) -= cq.weights[p] * vals[j] * g.y();
      }
    }
  }

  for (int le = 0; le < ne; ++le) {
    const EdgeBasis eb(mesh, edges[le], k);
    const QuadratureRule eq = edge_quadrature(mesh.edge_vertex(edges[le], 0),
                                              mesh.edge_vertex(edges[le], 1), 2 * k + 2);
    const Vec2 n = geom.edge_normal[le];
    const int off = 2 * d + le * (k + 1);
    Eigen::VectorXd t(nq);
    for (int p = 0; p < eq.size(); ++p) {
      t.setZero();
      for (int i = 0; i < d; ++i) {
        const double val = pk.eval(i, eq.points[p]);
        t[i] = val * n.x();
        t[d + i] = val * n.y();
      }
      for (int j = 0; j <= k; ++j) t[off + j] = -eb.eval(j, eq.points[p]);
      el.As += (geom.diameter * eq.weights[p]) * (t * t.transpose());
      for (int i = 0; i < nu; ++i) {
        const double wi = pk1.eval(i, eq.points[p]);
        for (int j = 0; j <= k; ++j)
          el.B(i, off + j) += eq.weights[p] * wi * eb.eval(j, eq.points[p]);
      }
    }
  }
  return el;
}

}  // namespace

CoupledSolution solve_coupled(const PolygonalMesh& mesh, const ProblemSpec& spec, int k) {
  const int modes = k + 1;
  const int dim_pk = poly_dim(k);
  const int dim_pk1 = poly_dim(k + 1);
  const int nq0_total = 2 * dim_pk * mesh.n_cells();
  const int nflux_total = modes * mesh.n_edges();
  const int nu_total = dim_pk1 * mesh.n_cells();
  const int N = nq0_total + nflux_total + nu_total;
  if (N > 20000)
    throw std::runtime_error("solve_coupled: " + std::to_string(N) +
                             " DOFs exceeds the 20000 oracle cap");

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CoupledElement el = assemble_element(mesh, c, spec, k);
    const auto& edges = mesh.cell_edges()[c];
    const auto& signs = mesh.cell_edge_sign()[c];
    const int ne = static_cast<int>(edges.size());
    const int nq_loc = 2 * dim_pk + ne * modes;

    // Local q DOF -> (global index, sign). The single-valued flux is stored
    // w.r.t. the canonical edge normal; the owning-cell normal flips it by
    // the traversal sign.
    std::vector<int> gq(nq_loc);
    std::vector<double> sq(nq_loc);
    for (int i = 0; i < 2 * dim_pk; ++i) {
      gq[i] = c * 2 * dim_pk + i;
      sq[i] = 1.0;
    }
    for (int le = 0; le < ne; ++le) {
      for (int j = 0; j < modes; ++j) {
        gq[2 * dim_pk + le * modes + j] = nq0_total + edges[le] * modes + j;
        sq[2 * dim_pk + le * modes + j] = static_cast<double>(signs[le]);
      }
    }

    for (int i = 0; i < nq_loc; ++i)
      for (int j = 0; j < nq_loc; ++j)
        K(gq[i], gq[j]) += sq[i] * sq[j] * el.As(i, j);

    for (int i = 0; i < dim_pk1; ++i) {
      const int gu = nq0_total + nflux_total + c * dim_pk1 + i;
      for (int j = 0; j < nq_loc; ++j) {
        K(gu, gq[j]) += sq[j] * el.B(i, j);
        K(gq[j], gu) -= sq[j] * el.B(i, j);
      }
    }

    // RHS: -<g, v_b.n> on boundary edges and (f, w) on the cell.
    const CellBasis pk1(mesh, c, k + 1);
    const QuadratureRule cq = cell_quadrature(mesh, c, 2 * (k + 1) + 2);
    for (int p = 0; p < cq.size(); ++p) {
      const double fw = cq.weights[p] * spec.f(cq.points[p]);
      for (int i = 0; i < dim_pk1; ++i)
        rhs[nq0_total + nflux_total + c * dim_pk1 + i] += fw * pk1.eval(i, cq.points[p]);
    }
    for (int le = 0; le < ne; ++le) {
      if (!mesh.is_boundary_edge(edges[le])) continue;
      const EdgeBasis eb(mesh, edges[le], k);
      // Same quadrature as project_edge's default, so the weakly enforced
      // boundary value matches the hybrid path's Q_b g exactly.
      const QuadratureRule eq = edge_quadrature(mesh.edge_vertex(edges[le], 0),
                                                mesh.edge_vertex(edges[le], 1), 2 * k + 14);
      for (int p = 0; p < eq.size(); ++p) {
        const double gv = eq.weights[p] * spec.g(eq.points[p]);
        for (int j = 0; j < modes; ++j)
          rhs[nq0_total + edges[le] * modes + j] -= signs[le] * gv * eb.eval(j, eq.points[p]);
      }
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  const Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite() || (K * x - rhs).norm() > 1e-8 * (1.0 + rhs.norm()))
    throw std::runtime_error("solve_coupled: singular coupled system");

  CoupledSolution sol;
  sol.k = k;
  sol.q0.resize(mesh.n_cells());
  sol.qb.resize(mesh.n_edges());
  sol.u.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    sol.q0[c] = x.segment(c * 2 * dim_pk, 2 * dim_pk);
    sol.u[c] = x.segment(nq0_total + nflux_total + c * dim_pk1, dim_pk1);
  }
  for (int e = 0; e < mesh.n_edges(); ++e)
    sol.qb[e] = x.segment(nq0_total + e * modes, modes);
  return sol;
}

EquivalenceReport compare_hybrid_vs_coupled(const PolygonalMesh& mesh, const ProblemSpec& spec,
                                            int k) {
  const WGSolution hybrid = solve_hwg(mesh, spec, k);
  const CoupledSolution coupled = solve_coupled(mesh, spec, k);

  double scale_q0 = 0.0, scale_u = 0.0, scale_qb = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    scale_q0 = std::max(scale_q0, coupled.q0[c].cwiseAbs().maxCoeff());
    scale_u = std::max(scale_u, coupled.u[c].cwiseAbs().maxCoeff());
  }
  for (int e = 0; e < mesh.n_edges(); ++e)
    scale_qb = std::max(scale_qb, coupled.qb[e].cwiseAbs().maxCoeff());
  scale_q0 = std::max(scale_q0, 1.0);
  scale_u = std::max(scale_u, 1.0);
  scale_qb = std::max(scale_qb, 1.0);

  EquivalenceReport rep;
  rep.max_hybrid_qb_jump = max_flux_jump(mesh, hybrid);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    rep.max_q0_diff = std::max(rep.max_q0_diff,
                               (hybrid.q0[c] - coupled.q0[c]).cwiseAbs().maxCoeff() / scale_q0);
    rep.max_u_diff =
        std::max(rep.max_u_diff, (hybrid.u[c] - coupled.u[c]).cwiseAbs().maxCoeff() / scale_u);
    const auto& edges = mesh.cell_edges()[c];
    const auto& signs = mesh.cell_edge_sign()[c];
    for (int le = 0; le < static_cast<int>(edges.size()); ++le) {
      const Eigen::VectorXd expected = signs[le] * coupled.qb[edges[le]];
      rep.max_qb_diff = std::max(
          rep.max_qb_diff, (hybrid.qb[c][le] - expected).cwiseAbs().maxCoeff() / scale_qb);
    }
  }
  return rep;
}

}  // namespace hwg
