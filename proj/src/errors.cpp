#include "hwg/errors.hpp"

#include <cmath>
#include <limits>

#include "hwg/basis.hpp"
#include "hwg/local_ops.hpp"
#include "hwg/quadrature.hpp"

namespace hwg {

namespace {

// Projections of the exact solution are taken two degrees above the default
// quadrature so projection error stays below table resolution.
constexpr int kExtraDegree = 2;

double eval_poly(const CellBasis& basis, const Eigen::VectorXd& coeffs, const Vec2& x) {
  double v = 0.0;
  for (int i = 0; i < basis.dim(); ++i) v += coeffs[i] * basis.eval(i, x);
  return v;
}

Vec2 eval_poly_grad(const CellBasis& basis, const Eigen::VectorXd& coeffs, const Vec2& x) {
  Vec2 g = Vec2::Zero();
  for (int i = 0; i < basis.dim(); ++i) g += coeffs[i] * basis.grad(i, x);
  return g;
}

}  // namespace

double triple_norm_error(const PolygonalMesh& mesh, const ProblemSpec& spec,
                         const WGSolution& sol, int k, bool alpha_weighted) {
  double total = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellBasis pk(mesh, c, k);
    const auto& geom = mesh.geometry(c);
    const Eigen::VectorXd e0 =
        project_cell_vector(mesh, c, spec.exact_q, k, kExtraDegree) - sol.q0[c];
    const int d = pk.dim();

    const QuadratureRule cq = cell_quadrature(mesh, c, 2 * k + 2 + kExtraDegree);
    for (int p = 0; p < cq.size(); ++p) {
      Vec2 v(eval_poly(pk, e0.head(d), cq.points[p]), eval_poly(pk, e0.tail(d), cq.points[p]));
      if (alpha_weighted)
        total += cq.weights[p] * v.dot(spec.alpha(cq.points[p]) * v);
      else
        total += cq.weights[p] * v.squaredNorm();
    }

    const auto& edges = mesh.cell_edges()[c];
    for (int le = 0; le < static_cast<int>(edges.size()); ++le) {
      const Vec2 n = geom.edge_normal[le];
      const Eigen::VectorXd eb =
          project_edge(mesh, edges[le], [&](const Vec2& x) { return spec.exact_q(x).dot(n); }, k,
                       kExtraDegree) -
          sol.qb[c][le];
      const EdgeBasis ebasis(mesh, edges[le], k);
      const QuadratureRule eq = edge_quadrature(mesh.edge_vertex(edges[le], 0),
                                                mesh.edge_vertex(edges[le], 1),
                                                2 * k + 2 + kExtraDegree);
      for (int p = 0; p < eq.size(); ++p) {
        const Vec2 v(eval_poly(pk, e0.head(d), eq.points[p]),
                     eval_poly(pk, e0.tail(d), eq.points[p]));
        double ebv = 0.0;
        for (int j = 0; j <= k; ++j) ebv += eb[j] * ebasis.eval(j, eq.points[p]);
        const double mis = v.dot(n) - ebv;
        total += geom.diameter * eq.weights[p] * mis * mis;
      }
    }
  }
  return std::sqrt(total);
}

double h1_norm_error(const PolygonalMesh& mesh, const ProblemSpec& spec, const WGSolution& sol,
                     int k, BoundaryJumpConvention convention) {
  std::vector<Eigen::VectorXd> eps(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c)
    eps[c] = project_cell_scalar(mesh, c, spec.exact_u, k + 1, kExtraDegree) - sol.u[c];

  double total = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellBasis pk1(mesh, c, k + 1);
    const QuadratureRule cq = cell_quadrature(mesh, c, 2 * k + 2 + kExtraDegree);
    for (int p = 0; p < cq.size(); ++p)
      total += cq.weights[p] * eval_poly_grad(pk1, eps[c], cq.points[p]).squaredNorm();
  }

  const double h = mesh.mesh_size();
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto cells = mesh.edge_cells()[e];
    if (mesh.is_boundary_edge(e) && convention == BoundaryJumpConvention::kInteriorOnly) continue;
    const QuadratureRule eq = edge_quadrature(mesh.edge_vertex(e, 0), mesh.edge_vertex(e, 1),
                                              2 * (k + 1) + 2 + kExtraDegree);
    const CellBasis b1(mesh, cells[0], k + 1);
    double jump_sq = 0.0;
    if (cells[1] >= 0) {
      const CellBasis b2(mesh, cells[1], k + 1);
      for (int p = 0; p < eq.size(); ++p) {
        const double j = eval_poly(b1, eps[cells[0]], eq.points[p]) -
                         eval_poly(b2, eps[cells[1]], eq.points[p]);
        jump_sq += eq.weights[p] * j * j;
      }
    } else {
      for (int p = 0; p < eq.size(); ++p) {
        const double j = eval_poly(b1, eps[cells[0]], eq.points[p]);
        jump_sq += eq.weights[p] * j * j;
      }
    }
    total += jump_sq / h;
  }
  return std::sqrt(total);
}

double l2_norm_error(const PolygonalMesh& mesh, const ProblemSpec& spec, const WGSolution& sol,
                     int k) {
  double total = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellBasis pk1(mesh, c, k + 1);
    const Eigen::VectorXd eps =
        project_cell_scalar(mesh, c, spec.exact_u, k + 1, kExtraDegree) - sol.u[c];
    const QuadratureRule cq = cell_quadrature(mesh, c, 2 * (k + 1) + 2 + kExtraDegree);
    for (int p = 0; p < cq.size(); ++p) {
      const double v = eval_poly(pk1, eps, cq.points[p]);
      total += cq.weights[p] * v * v;
    }
  }
  return std::sqrt(total);
}

double multiplier_norm_error(const PolygonalMesh& mesh, const ProblemSpec& spec,
                             const WGSolution& sol, int k) {
  // Q_b u per edge, shared by both adjacent cells.
  std::vector<Eigen::VectorXd> qbu(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e)
    qbu[e] = project_edge(mesh, e, spec.exact_u, k, kExtraDegree);

  double total = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& edges = mesh.cell_edges()[c];
    const double hT = mesh.geometry(c).diameter;
    for (int e : edges) {
      if (mesh.is_boundary_edge(e)) continue;
      const Eigen::VectorXd diff = sol.lambda[e] - qbu[e];
      const EdgeBasis basis(mesh, e, k);
      const QuadratureRule eq = edge_quadrature(mesh.edge_vertex(e, 0), mesh.edge_vertex(e, 1),
                                                2 * k + kExtraDegree);
      const Eigen::MatrixXd M = basis.mass_matrix(eq);
      total += hT * diff.dot(M * diff);
    }
  }
  return std::sqrt(total);
}

ErrorReport compute_errors(const PolygonalMesh& mesh, const ProblemSpec& spec,
                           const WGSolution& sol, int k, BoundaryJumpConvention convention) {
  ErrorReport rep;
  rep.h = mesh.mesh_size();
  rep.triple_e = triple_norm_error(mesh, spec, sol, k);
  rep.delta = multiplier_norm_error(mesh, spec, sol, k);
  rep.eps_h1 = h1_norm_error(mesh, spec, sol, k, convention);
  rep.eps_l2 = l2_norm_error(mesh, spec, sol, k);
  return rep;
}

void attach_rates(std::vector<ErrorReport>& reports) {
  for (size_t i = 1; i < reports.size(); ++i) {
    const double lh = std::log(reports[i - 1].h / reports[i].h);
    auto rate = [lh](double prev, double cur) { return std::log(prev / cur) / lh; };
    reports[i].rate_triple = rate(reports[i - 1].triple_e, reports[i].triple_e);
    reports[i].rate_delta = rate(reports[i - 1].delta, reports[i].delta);
    reports[i].rate_h1 = rate(reports[i - 1].eps_h1, reports[i].eps_h1);
    reports[i].rate_l2 = rate(reports[i - 1].eps_l2, reports[i].eps_l2);
  }
}

std::vector<double> rates(const std::vector<std::pair<double, double>>& h_and_value) {
  std::vector<double> out(h_and_value.size(), std::numeric_limits<double>::quiet_NaN());
  for (size_t i = 1; i < h_and_value.size(); ++i) {
    const auto& [h0, v0] = h_and_value[i - 1];
    const auto& [h1, v1] = h_and_value[i];
    out[i] = std::log(v0 / v1) / std::log(h0 / h1);
  }
  return out;
}

}  // namespace hwg
