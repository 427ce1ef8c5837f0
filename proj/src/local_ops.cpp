#include "hwg/local_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace hwg {

ElementContext::ElementContext(const PolygonalMesh& m, int c, int order, int extra_degree)
    : mesh(&m),
      cell(c),
      k(order),
      pk(m, c, order),
      pk1(m, c, order + 1),
      cell_quad(cell_quadrature(m, c, 2 * (order + 1) + 2 + extra_degree)) {
  const auto& edges = m.cell_edges()[c];
  edge_basis.reserve(edges.size());
  edge_quad.reserve(edges.size());
  for (int e : edges) {
    edge_basis.emplace_back(m, e, order);
    edge_quad.push_back(edge_quadrature(m.edge_vertex(e, 0), m.edge_vertex(e, 1),
                                        2 * order + 2 + extra_degree));
  }
}

namespace {

Eigen::VectorXd solve_projection(const Eigen::MatrixXd& M, const Eigen::VectorXd& b) {
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("projection mass matrix is not SPD (degenerate cell or edge)");
  Eigen::VectorXd c = llt.solve(b);
  const double resid = (M * c - b).norm();
  if (resid > 1e-12 * (1.0 + b.norm()))
    throw std::runtime_error("projection solve residual too large");
  return c;
}

}  // namespace

Eigen::VectorXd project_cell_scalar(const PolygonalMesh& mesh, int cell,
                                    const std::function<double(const Vec2&)>& w,
                                    int order, int extra_degree) {
  const CellBasis basis(mesh, cell, order);
  const QuadratureRule quad = cell_quadrature(mesh, cell, 2 * order + 2 + extra_degree);
  const Eigen::MatrixXd V = basis.values(quad);
  Eigen::VectorXd wvals(quad.size());
  for (int p = 0; p < quad.size(); ++p) wvals[p] = w(quad.points[p]);
  const Eigen::MatrixXd M = V.transpose() * quad.weights.asDiagonal() * V;
  const Eigen::VectorXd b = V.transpose() * quad.weights.cwiseProduct(wvals);
  return solve_projection(M, b);
}

Eigen::VectorXd project_cell_vector(const PolygonalMesh& mesh, int cell,
                                    const std::function<Vec2(const Vec2&)>& v,
                                    int order, int extra_degree) {
  const Eigen::VectorXd cx = project_cell_scalar(
      mesh, cell, [&v](const Vec2& p) { return v(p).x(); }, order, extra_degree);
  const Eigen::VectorXd cy = project_cell_scalar(
      mesh, cell, [&v](const Vec2& p) { return v(p).y(); }, order, extra_degree);
  Eigen::VectorXd out(cx.size() + cy.size());
  out << cx, cy;
  return out;
}

Eigen::VectorXd project_edge(const PolygonalMesh& mesh, int edge,
                             const std::function<double(const Vec2&)>& w,
                             int order, int extra_degree) {
  const EdgeBasis basis(mesh, edge, order);
  const QuadratureRule quad = edge_quadrature(mesh.edge_vertex(edge, 0), mesh.edge_vertex(edge, 1),
                                              2 * order + 2 + extra_degree);
  const Eigen::MatrixXd V = basis.values(quad);
  Eigen::VectorXd wvals(quad.size());
  for (int p = 0; p < quad.size(); ++p) wvals[p] = w(quad.points[p]);
  const Eigen::MatrixXd M = V.transpose() * quad.weights.asDiagonal() * V;
  const Eigen::VectorXd b = V.transpose() * quad.weights.cwiseProduct(wvals);
  return solve_projection(M, b);
}

WeakVector embed(const ElementContext& ctx, const std::function<Vec2(const Vec2&)>& p) {
  WeakVector v;
  v.q0 = project_cell_vector(*ctx.mesh, ctx.cell, p, ctx.k);
  const auto& edges = ctx.mesh->cell_edges()[ctx.cell];
  const auto& geom = ctx.geom();
  for (int le = 0; le < ctx.n_edges(); ++le) {
    const Vec2 n = geom.edge_normal[le];
    v.qb.push_back(project_edge(*ctx.mesh, edges[le],
                                [&p, n](const Vec2& x) { return p(x).dot(n); }, ctx.k));
  }
  return v;
}

Eigen::VectorXd weak_divergence(const ElementContext& ctx, const WeakVector& v) {
  const int dim = ctx.dim_pk1();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dim);
  // Volume part: -(v0, grad phi)_T
  {
    const QuadratureRule& q = ctx.cell_quad;
    for (int p = 0; p < q.size(); ++p) {
      Vec2 v0 = Vec2::Zero();
      for (int i = 0; i < ctx.dim_pk(); ++i) {
        const double val = ctx.pk.eval(i, q.points[p]);
        v0.x() += v.q0[i] * val;
        v0.y() += v.q0[ctx.dim_pk() + i] * val;
      }
      for (int i = 0; i < dim; ++i)
        r[i] -= q.weights[p] * v0.dot(ctx.pk1.grad(i, q.points[p]));
    }
  }
  // Boundary part: <vb, phi>_e per edge (vb already encodes v_b . n).
  for (int le = 0; le < ctx.n_edges(); ++le) {
    const QuadratureRule& q = ctx.edge_quad[le];
    for (int p = 0; p < q.size(); ++p) {
      double vb = 0.0;
      for (int j = 0; j <= ctx.k; ++j) vb += v.qb[le][j] * ctx.edge_basis[le].eval(j, q.points[p]);
      for (int i = 0; i < dim; ++i)
        r[i] += q.weights[p] * vb * ctx.pk1.eval(i, q.points[p]);
    }
  }
  const Eigen::MatrixXd M = ctx.pk1.mass_matrix(ctx.cell_quad);
  return solve_projection(M, r);
}

Eigen::MatrixXd stabilizer_matrix(const ElementContext& ctx) {
  const int nq = ctx.nq();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(nq, nq);
  const double hT = ctx.geom().diameter;
  Eigen::VectorXd t(nq);
  for (int le = 0; le < ctx.n_edges(); ++le) {
    const Vec2 n = ctx.geom().edge_normal[le];
    const QuadratureRule& q = ctx.edge_quad[le];
    for (int p = 0; p < q.size(); ++p) {
      t.setZero();
      for (int i = 0; i < ctx.dim_pk(); ++i) {
        const double val = ctx.pk.eval(i, q.points[p]);
        t[i] = val * n.x();
        t[ctx.dim_pk() + i] = val * n.y();
      }
      for (int j = 0; j <= ctx.k; ++j)
        t[ctx.qb_offset(le) + j] = -ctx.edge_basis[le].eval(j, q.points[p]);
      S.selfadjointView<Eigen::Lower>().rankUpdate(t, hT * q.weights[p]);
    }
  }
  return S.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd form_a(const ElementContext& ctx,
                       const std::function<Eigen::Matrix2d(const Vec2&)>& alpha) {
  const int n0 = ctx.nq0();
  const int d = ctx.dim_pk();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n0, n0);
  const QuadratureRule& q = ctx.cell_quad;
  Eigen::VectorXd vals(d);
  for (int p = 0; p < q.size(); ++p) {
    const Eigen::Matrix2d al = alpha(q.points[p]);
    if (std::abs(al(0, 1) - al(1, 0)) > 1e-12 * al.norm() || al(0, 0) <= 0.0 ||
        al.determinant() <= 0.0)
      throw std::runtime_error("alpha is not SPD at point (" + std::to_string(q.points[p].x()) +
                               ", " + std::to_string(q.points[p].y()) + ")");
    for (int i = 0; i < d; ++i) vals[i] = ctx.pk.eval(i, q.points[p]);
    const Eigen::MatrixXd outer = q.weights[p] * (vals * vals.transpose());
    A.block(0, 0, d, d) += al(0, 0) * outer;
    A.block(0, d, d, d) += al(0, 1) * outer;
    A.block(d, 0, d, d) += al(1, 0) * outer;
    A.block(d, d, d, d) += al(1, 1) * outer;
  }
  return A;
}

Eigen::MatrixXd form_b(const ElementContext& ctx) {
  const int nu = ctx.nu();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nu, ctx.nq());
  const QuadratureRule& q = ctx.cell_quad;
  for (int p = 0; p < q.size(); ++p) {
    for (int i = 0; i < nu; ++i) {
      const Vec2 g = ctx.pk1.grad(i, q.points[p]);
      for (int j = 0; j < ctx.dim_pk(); ++j) {
        const double val = q.weights[p] * ctx.pk.eval(j, q.points[p]);
        B(i, j) -= val * g.x();
        B(i, ctx.dim_pk() + j) -= val * g.y();
      }
    }
  }
  for (int le = 0; le < ctx.n_edges(); ++le) {
    const QuadratureRule& eq = ctx.edge_quad[le];
    for (int p = 0; p < eq.size(); ++p) {
      for (int i = 0; i < nu; ++i) {
        const double wi = ctx.pk1.eval(i, eq.points[p]);
        for (int j = 0; j <= ctx.k; ++j)
          B(i, ctx.qb_offset(le) + j) +=
              eq.weights[p] * wi * ctx.edge_basis[le].eval(j, eq.points[p]);
      }
    }
  }
  return B;
}

Eigen::MatrixXd form_c(const ElementContext& ctx) {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(ctx.nq(), ctx.nlam());
  for (int le = 0; le < ctx.n_edges(); ++le) {
    const Eigen::MatrixXd Me = ctx.edge_basis[le].mass_matrix(ctx.edge_quad[le]);
    C.block(ctx.qb_offset(le), le * (ctx.k + 1), ctx.k + 1, ctx.k + 1) = Me;
  }
  return C;
}

Eigen::VectorXd LocalSystem::recover(const Eigen::VectorXd& lambda_local) const {
  return lifting * lambda_local + particular;
}

LocalSystem build_local_system(const ElementContext& ctx, const ProblemSpec& spec) {
  LocalSystem sys;
  sys.cell = ctx.cell;
  sys.k = ctx.k;
  sys.nq = ctx.nq();
  sys.nu = ctx.nu();
  sys.nlam = ctx.nlam();
  const int n = sys.nq + sys.nu;

  Eigen::MatrixXd As = stabilizer_matrix(ctx);
  As.topLeftCorner(ctx.nq0(), ctx.nq0()) += form_a(ctx, spec.alpha);
  sys.B = form_b(ctx);
  const Eigen::MatrixXd& B = sys.B;
  sys.C = form_c(ctx);

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  K.topLeftCorner(sys.nq, sys.nq) = As;
  K.topRightCorner(sys.nq, sys.nu) = -B.transpose();
  K.bottomLeftCorner(sys.nu, sys.nq) = B;

  sys.factorization.compute(K);
  // PartialPivLU has no rank signal; check the solve instead.
  {
    const Eigen::VectorXd probe = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd x = sys.factorization.solve(probe);
    if (!(x.allFinite()) || (K * x - probe).norm() > 1e-8 * probe.norm() * (1.0 + K.norm()))
      throw std::runtime_error("singular local saddle system on cell " + std::to_string(ctx.cell));
  }

  // Lifting: solve with rhs [-C theta; 0] for every trace basis vector.
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, sys.nlam);
  rhs.topRows(sys.nq) = -sys.C;
  sys.lifting = sys.factorization.solve(rhs);

  sys.schur = sys.lifting_q().transpose() * As * sys.lifting_q();
  sys.schur = 0.5 * (sys.schur + sys.schur.transpose()).eval();

  // f-moments against P_{k+1} and the particular solution.
  sys.f_moments = Eigen::VectorXd::Zero(sys.nu);
  for (int p = 0; p < ctx.cell_quad.size(); ++p) {
    const double fw = ctx.cell_quad.weights[p] * spec.f(ctx.cell_quad.points[p]);
    for (int i = 0; i < sys.nu; ++i)
      sys.f_moments[i] += fw * ctx.pk1.eval(i, ctx.cell_quad.points[p]);
  }
  Eigen::VectorXd rhs_f = Eigen::VectorXd::Zero(n);
  rhs_f.tail(sys.nu) = sys.f_moments;
  sys.particular = sys.factorization.solve(rhs_f);

  // Reduced rhs: (f, H_u phi)_T, cross-checked against the trace coupling of
  // the particular solution (equal by the symmetry of the reduced form).
  sys.rhs_trace = sys.lifting_u().transpose() * sys.f_moments;
  const Eigen::VectorXd alt = sys.C.transpose() * sys.particular.head(sys.nq);
  if ((sys.rhs_trace - alt).norm() > 1e-12 * (1.0 + sys.rhs_trace.norm() + alt.norm()) * 100.0)
    throw std::runtime_error("reduced rhs route mismatch on cell " + std::to_string(ctx.cell));

  return sys;
}

LocalSystem build_local_system(const PolygonalMesh& mesh, int cell, const ProblemSpec& spec, int k) {
  return build_local_system(ElementContext(mesh, cell, k), spec);
}

}  // namespace hwg
