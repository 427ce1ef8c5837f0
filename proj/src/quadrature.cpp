#include "hwg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hwg {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  nodes.resize(n);
  weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

QuadratureRule edge_quadrature(const Vec2& a, const Vec2& b, int degree) {
  if (degree < 0) throw std::invalid_argument("edge_quadrature: degree must be >= 0");
  const int n = degree / 2 + 1;  // 2n-1 >= degree
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadratureRule rule;
  rule.exactness = degree;
  rule.points.resize(n);
  rule.weights.resize(n);
  const double len = (b - a).norm();
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * (x[i] + 1.0);
    rule.points[i] = a + t * (b - a);
    rule.weights[i] = 0.5 * len * w[i];
  }
  return rule;
}

namespace {

// Collapsed-coordinate rule on the triangle (A, B, C), exact through
// `degree`. Maps a tensor Gauss grid on the unit square by
// (u, v) -> A + u(1-v)(B-A) + v(C-A) with Jacobian factor (1-v); the v
// direction therefore needs one extra degree.
void append_triangle_rule(const Vec2& A, const Vec2& B, const Vec2& C, int degree,
                          std::vector<Vec2>& pts, std::vector<double>& wts) {
  const double area2 = (B - A).x() * (C - A).y() - (C - A).x() * (B - A).y();
  const int nu = degree / 2 + 1;
  const int nv = (degree + 1) / 2 + 1;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre(nu, xu, wu);
  gauss_legendre(nv, xv, wv);
  for (int i = 0; i < nu; ++i) {
    const double u = 0.5 * (xu[i] + 1.0);
    for (int j = 0; j < nv; ++j) {
      const double v = 0.5 * (xv[j] + 1.0);
      pts.push_back(A + u * (1.0 - v) * (B - A) + v * (C - A));
      wts.push_back(0.25 * wu[i] * wv[j] * (1.0 - v) * area2);
    }
  }
}

}  // namespace

QuadratureRule cell_quadrature(const std::vector<Vec2>& loop, const Vec2& centroid, int degree) {
  if (degree < 0) throw std::invalid_argument("cell_quadrature: degree must be >= 0");
  const int m = static_cast<int>(loop.size());
  double diam2 = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      diam2 = std::max(diam2, (loop[i] - loop[j]).squaredNorm());

  std::vector<Vec2> pts;
  std::vector<double> wts;
  for (int i = 0; i < m; ++i) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[(i + 1) % m];
    const double tri_area = 0.5 * ((a - centroid).x() * (b - centroid).y() -
                                   (b - centroid).x() * (a - centroid).y());
    if (tri_area < 1e-14 * diam2)
      throw std::invalid_argument("cell_quadrature: degenerate fan triangle (cell not star-shaped)");
    append_triangle_rule(centroid, a, b, degree, pts, wts);
  }
  QuadratureRule rule;
  rule.exactness = degree;
  rule.points = std::move(pts);
  rule.weights = Eigen::Map<Eigen::VectorXd>(wts.data(), static_cast<Eigen::Index>(wts.size()));
  return rule;
}

QuadratureRule cell_quadrature(const PolygonalMesh& mesh, int cell, int degree) {
  std::vector<Vec2> loop;
  for (int v : mesh.cell(cell)) loop.push_back(mesh.vertex(v));
  return cell_quadrature(loop, mesh.geometry(cell).centroid, degree);
}

}  // namespace hwg
