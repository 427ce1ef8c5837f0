#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hwg/local_ops.hpp"
#include "hwg/problems.hpp"

using namespace hwg;

namespace {

PolygonalMesh unit_right_triangle() {
  return PolygonalMesh({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}, {{0, 1, 2}});
}

PolygonalMesh unit_square_cell() {
  return PolygonalMesh({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}, {{0, 1, 2, 3}});
}

double eval_cell_poly(const CellBasis& b, const Eigen::VectorXd& c, const Vec2& x) {
  double v = 0.0;
  for (int i = 0; i < b.dim(); ++i) v += c[i] * b.eval(i, x);
  return v;
}

WeakVector random_weak_vector(const ElementContext& ctx, std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  WeakVector v;
  v.q0.resize(ctx.nq0());
  for (int i = 0; i < ctx.nq0(); ++i) v.q0[i] = unif(rng);
  for (int le = 0; le < ctx.n_edges(); ++le) {
    Eigen::VectorXd c(ctx.k + 1);
    for (int j = 0; j <= ctx.k; ++j) c[j] = unif(rng);
    v.qb.push_back(c);
  }
  return v;
}

Eigen::VectorXd flatten(const ElementContext& ctx, const WeakVector& v) {
  Eigen::VectorXd x(ctx.nq());
  x.head(ctx.nq0()) = v.q0;
  for (int le = 0; le < ctx.n_edges(); ++le)
    x.segment(ctx.qb_offset(le), ctx.k + 1) = v.qb[le];
  return x;
}

}  // namespace

TEST_CASE("cell scalar projection") {
  const auto mesh = unit_right_triangle();
  // Constants map to the constant coefficient.
  auto c3 = project_cell_scalar(mesh, 0, [](const Vec2&) { return 3.0; }, 2);
  CHECK(c3[0] == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(c3.tail(c3.size() - 1).cwiseAbs().maxCoeff() < 1e-12);

  // Degree <= m polynomials are reproduced at quadrature points.
  auto cx = project_cell_scalar(mesh, 0, [](const Vec2& p) { return p.x(); }, 1);
  const CellBasis b1(mesh, 0, 1);
  const auto quad = cell_quadrature(mesh, 0, 4);
  for (int p = 0; p < quad.size(); ++p)
    CHECK(eval_cell_poly(b1, cx, quad.points[p]) ==
          doctest::Approx(quad.points[p].x()).epsilon(1e-12));

  // Non-polynomial: frozen against a brute-force degree-12 projection.
  const auto sq = unit_square_cell();
  auto f = [](const Vec2& p) { return std::sin(M_PI * p.x()); };
  const auto c_default = project_cell_scalar(sq, 0, f, 1);
  const auto c_brute = project_cell_scalar(sq, 0, f, 1, 12);
  const CellBasis sb(sq, 0, 1);
  const Vec2 centroid = sq.geometry(0).centroid;
  CHECK(eval_cell_poly(sb, c_default, centroid) ==
        doctest::Approx(eval_cell_poly(sb, c_brute, centroid)).epsilon(1e-6));
}

TEST_CASE("cell vector projection") {
  const auto mesh = gen_rectangular(2);
  auto cc = project_cell_vector(mesh, 0, [](const Vec2&) { return Vec2(1.0, 2.0); }, 1);
  const int d = poly_dim(1);
  CHECK(cc[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(cc[d] == doctest::Approx(2.0).epsilon(1e-13));

  // grad(xy) = (y, x) at k = 0: cell averages, by independent quadrature.
  for (int c = 0; c < mesh.n_cells(); ++c) {
    auto coeffs = project_cell_vector(mesh, c, [](const Vec2& p) { return Vec2(p.y(), p.x()); }, 0);
    const auto quad = cell_quadrature(mesh, c, 3);
    double avg_y = 0.0, avg_x = 0.0;
    for (int p = 0; p < quad.size(); ++p) {
      avg_y += quad.weights[p] * quad.points[p].y();
      avg_x += quad.weights[p] * quad.points[p].x();
    }
    const double area = mesh.geometry(c).area;
    CHECK(coeffs[0] == doctest::Approx(avg_y / area).epsilon(1e-12));
    CHECK(coeffs[1] == doctest::Approx(avg_x / area).epsilon(1e-12));
  }

  // Componentwise consistency with scalar projections.
  const auto spec = example2();
  auto qv = project_cell_vector(mesh, 1, spec.exact_q, 0);
  auto qx = project_cell_scalar(mesh, 1, [&](const Vec2& p) { return spec.exact_q(p).x(); }, 0);
  auto qy = project_cell_scalar(mesh, 1, [&](const Vec2& p) { return spec.exact_q(p).y(); }, 0);
  CHECK(qv[0] == doctest::Approx(qx[0]).epsilon(1e-12));
  CHECK(qv[1] == doctest::Approx(qy[0]).epsilon(1e-12));
}

TEST_CASE("edge projection") {
  const auto mesh = unit_square_cell();
  // Bottom edge is (0,0)-(1,0).
  int bottom = -1;
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (mesh.edge_midpoint(e).isApprox(Vec2(0.5, 0.0))) bottom = e;
  REQUIRE(bottom >= 0);

  auto avg = project_edge(mesh, bottom, [](const Vec2& p) { return p.x(); }, 0);
  CHECK(avg[0] == doctest::Approx(0.5).epsilon(1e-13));

  auto lin = project_edge(mesh, bottom, [](const Vec2& p) { return 2.0 * p.x() - 0.3; }, 1);
  const EdgeBasis eb(mesh, bottom, 1);
  for (double t : {0.1, 0.6, 0.95}) {
    const Vec2 x(t, 0.0);
    CHECK(lin[0] + lin[1] * eb.eval(1, x) == doctest::Approx(2.0 * t - 0.3).epsilon(1e-12));
  }

  auto s = project_edge(mesh, bottom, [](const Vec2& p) { return std::sin(M_PI * p.x()); }, 0);
  CHECK(s[0] == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("embed resolves normal components per owning cell") {
  const auto mesh = unit_square_cell();
  const ElementContext ctx(mesh, 0, 0);
  // Local edge 0 is the bottom edge, outward normal (0, -1).
  REQUIRE(ctx.geom().edge_normal[0].isApprox(Vec2(0, -1)));

  const auto vx = embed(ctx, [](const Vec2&) { return Vec2(1.0, 0.0); });
  CHECK(vx.qb[0][0] == doctest::Approx(0.0).epsilon(1e-13));

  const auto vy = embed(ctx, [](const Vec2&) { return Vec2(0.0, -1.0); });
  CHECK(vy.qb[0][0] == doctest::Approx(1.0).epsilon(1e-13));

  // Against per-edge quadrature averages of q.n for a manufactured flux.
  const auto spec = example1();
  const auto vq = embed(ctx, spec.exact_q);
  for (int le = 0; le < ctx.n_edges(); ++le) {
    const Vec2 n = ctx.geom().edge_normal[le];
    const int e = mesh.cell_edges()[0][le];
    const auto quad = edge_quadrature(mesh.edge_vertex(e, 0), mesh.edge_vertex(e, 1), 16);
    double avg = 0.0;
    for (int p = 0; p < quad.size(); ++p)
      avg += quad.weights[p] * spec.exact_q(quad.points[p]).dot(n);
    avg /= mesh.edge_length(e);
    CHECK(vq.qb[le][0] == doctest::Approx(avg).epsilon(1e-9));
  }
}

TEST_CASE("weak divergence") {
  const auto tri = unit_right_triangle();

  // Smooth fields: the weak divergence collapses to the classical one.
  {
    const ElementContext ctx(tri, 0, 0);
    const auto d = weak_divergence(ctx, embed(ctx, [](const Vec2&) { return Vec2(1.0, 0.0); }));
    CHECK(d.cwiseAbs().maxCoeff() < 1e-12);
  }
  {
    const ElementContext ctx(tri, 0, 1);
    const auto d = weak_divergence(ctx, embed(ctx, [](const Vec2& p) { return Vec2(p); }));
    CHECK(d[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.tail(d.size() - 1).cwiseAbs().maxCoeff() < 1e-11);
  }

  // q0 = 0, vb = 1 on all edges, k = 0: mean of the divergence equals
  // perimeter / area.
  {
    const ElementContext ctx(tri, 0, 0);
    WeakVector v;
    v.q0 = Eigen::VectorXd::Zero(2);
    for (int le = 0; le < 3; ++le) v.qb.push_back(Eigen::VectorXd::Ones(1));
    const auto d = weak_divergence(ctx, v);
    double mean = 0.0;
    for (int p = 0; p < ctx.cell_quad.size(); ++p)
      mean += ctx.cell_quad.weights[p] * eval_cell_poly(ctx.pk1, d, ctx.cell_quad.points[p]);
    mean /= ctx.geom().area;
    CHECK(mean == doctest::Approx((2.0 + std::sqrt(2.0)) / 0.5).epsilon(1e-12));
  }

  // Consistency over a perturbed quad mesh, k = 1, random polynomial field.
  {
    const auto mesh = gen_quad_family(2, 2, 0.2).back();
    auto p_field = [](const Vec2& p) {
      return Vec2(0.3 + p.x() - 2.0 * p.y(), -1.0 + 0.5 * p.x() + p.y());
    };
    for (int c : {0, 3, 7}) {
      const ElementContext ctx(mesh, c, 1);
      const auto d = weak_divergence(ctx, embed(ctx, p_field));
      // div p = 1 + 1 = 2
      CHECK(d[0] == doctest::Approx(2.0).epsilon(1e-11));
      CHECK(d.tail(d.size() - 1).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("stabilizer matrix") {
  const auto tri = unit_right_triangle();
  const ElementContext ctx(tri, 0, 0);
  const Eigen::MatrixXd S = stabilizer_matrix(ctx);
  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() == 0.0);

  // Embedded polynomials of degree <= k are in the kernel.
  const auto v = embed(ctx, [](const Vec2&) { return Vec2(0.7, -0.2); });
  const Eigen::VectorXd x = flatten(ctx, v);
  CHECK(std::abs(x.dot(S * x)) < 1e-13);

  // Hand-computed value for q0 = (1,0), qb = 0.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(ctx.nq());
  y[0] = 1.0;
  CHECK(y.dot(S * y) ==
        doctest::Approx(std::sqrt(2.0) * (1.0 + std::sqrt(2.0) / 2.0)).epsilon(1e-13));

  // PSD on random perturbed elements.
  const auto mesh = gen_quad_family(2, 2, 0.2).back();
  for (int c : {0, 5}) {
    const ElementContext qctx(mesh, c, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(stabilizer_matrix(qctx));
    CHECK(es.eigenvalues().minCoeff() > -1e-12 * es.eigenvalues().cwiseAbs().maxCoeff());
  }
}

TEST_CASE("bilinear forms") {
  const auto sq = unit_square_cell();
  const ElementContext ctx(sq, 0, 1);

  // Identity alpha: plain vector mass matrix in block form.
  const auto A = form_a(ctx, [](const Vec2&) { return Eigen::Matrix2d(Eigen::Matrix2d::Identity()); });
  const Eigen::MatrixXd M = ctx.pk.mass_matrix(ctx.cell_quad);
  const int d = ctx.dim_pk();
  CHECK((A.block(0, 0, d, d) - M).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((A.block(d, d, d, d) - M).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(A.block(0, d, d, d).cwiseAbs().maxCoeff() < 1e-13);

  // Non-SPD alpha is reported with the offending point.
  CHECK_THROWS_WITH_AS(
      form_a(ctx, [](const Vec2&) { return Eigen::Matrix2d(-Eigen::Matrix2d::Identity()); }),
      doctest::Contains("not SPD"), std::runtime_error);

  std::mt19937 rng(7);
  const Eigen::MatrixXd B = form_b(ctx);
  for (int trial = 0; trial < 5; ++trial) {
    const WeakVector v = random_weak_vector(ctx, rng);
    const Eigen::VectorXd x = flatten(ctx, v);

    // b_T(v, 1) = sum_e <vb, 1>_e.
    double edge_sum = 0.0;
    for (int le = 0; le < ctx.n_edges(); ++le) {
      const auto& eq = ctx.edge_quad[le];
      for (int p = 0; p < eq.size(); ++p) {
        double vb = 0.0;
        for (int j = 0; j <= ctx.k; ++j) vb += v.qb[le][j] * ctx.edge_basis[le].eval(j, eq.points[p]);
        edge_sum += eq.weights[p] * vb;
      }
    }
    CHECK((B * x)[0] == doctest::Approx(edge_sum).epsilon(1e-12));

    // Two routes: defining identity vs explicit weak divergence + mass pair.
    const Eigen::VectorXd dcoef = weak_divergence(ctx, v);
    const Eigen::VectorXd via_dwd = ctx.pk1.mass_matrix(ctx.cell_quad) * dcoef;
    CHECK((B * x - via_dwd).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + via_dwd.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("local system: lifting, Schur block, and condensation oracle") {
  const auto spec = example1();
  const auto mesh = gen_triangular(2);
  for (int k : {0, 1}) {
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const ElementContext ctx(mesh, c, k);
      const LocalSystem sys = build_local_system(ctx, spec);

      // Constant trace lifts to the constant scalar, zero flux.
      Eigen::VectorXd theta = Eigen::VectorXd::Zero(sys.nlam);
      for (int le = 0; le < ctx.n_edges(); ++le) theta[le * (k + 1)] = 4.2;
      const Eigen::VectorXd lifted = sys.lifting * theta;
      CHECK(lifted.head(sys.nq).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(lifted[sys.nq] == doctest::Approx(4.2).epsilon(1e-10));
      CHECK(lifted.tail(sys.nu - 1).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((sys.schur * theta).cwiseAbs().maxCoeff() < 1e-10);

      // Symmetric PSD.
      CHECK((sys.schur - sys.schur.transpose()).cwiseAbs().maxCoeff() <
            1e-12 * (1.0 + sys.schur.cwiseAbs().maxCoeff()));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.schur);
      CHECK(es.eigenvalues().minCoeff() > -1e-12 * es.eigenvalues().cwiseAbs().maxCoeff());

      // Brute-force dense condensation of the bordered system.
      Eigen::MatrixXd As = stabilizer_matrix(ctx);
      As.topLeftCorner(ctx.nq0(), ctx.nq0()) += form_a(ctx, spec.alpha);
      const Eigen::MatrixXd B = form_b(ctx);
      const Eigen::MatrixXd C = form_c(ctx);
      const int n = sys.nq + sys.nu;
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
      K.topLeftCorner(sys.nq, sys.nq) = As;
      K.topRightCorner(sys.nq, sys.nu) = -B.transpose();
      K.bottomLeftCorner(sys.nu, sys.nq) = B;
      Eigen::MatrixXd Cfull = Eigen::MatrixXd::Zero(n, sys.nlam);
      Cfull.topRows(sys.nq) = C;
      const Eigen::MatrixXd S_alg =
          Cfull.transpose() * Eigen::FullPivLU<Eigen::MatrixXd>(K).solve(Cfull);
      CHECK((sys.schur - S_alg).cwiseAbs().maxCoeff() <
            1e-10 * (1.0 + S_alg.cwiseAbs().maxCoeff()));

      // Lifting satisfies both local equations for a random trace.
      std::mt19937 rng(c + 100 * k);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      Eigen::VectorXd rnd(sys.nlam);
      for (int i = 0; i < sys.nlam; ++i) rnd[i] = unif(rng);
      const Eigen::VectorXd xl = sys.lifting * rnd;
      const Eigen::VectorXd rq =
          As * xl.head(sys.nq) - B.transpose() * xl.tail(sys.nu) + C * rnd;
      const Eigen::VectorXd ru = B * xl.head(sys.nq);
      CHECK(rq.cwiseAbs().maxCoeff() < 1e-11 * (1.0 + rnd.norm()));
      CHECK(ru.cwiseAbs().maxCoeff() < 1e-11 * (1.0 + rnd.norm()));
    }
  }
}

TEST_CASE("local systems are nonsingular across mesh families and orders") {
  const auto spec = example2();
  for (int k : {0, 1, 2}) {
    for (const auto& mesh :
         {gen_triangular(2), gen_rectangular(2), gen_quad_family(2, 2, 0.25).back()}) {
      for (int c = 0; c < mesh.n_cells(); ++c)
        CHECK_NOTHROW(build_local_system(mesh, c, spec, k));
    }
  }
}
