#include "hwg/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace hwg {

CellBasis::CellBasis(int degree, const Vec2& center, double scale)
    : degree_(degree), center_(center), scale_(scale) {
  if (degree < 0) throw std::invalid_argument("CellBasis: degree must be >= 0");
  if (scale <= 0.0) throw std::invalid_argument("CellBasis: scale must be positive");
  for (int d = 0; d <= degree; ++d) {
    for (int ay = 0; ay <= d; ++ay) {
      px_.push_back(d - ay);
      py_.push_back(ay);
    }
  }
}

CellBasis::CellBasis(const PolygonalMesh& mesh, int cell, int degree)
    : CellBasis(degree, mesh.geometry(cell).centroid, mesh.geometry(cell).diameter) {}

double CellBasis::eval(int i, const Vec2& x) const {
  const double u = (x.x() - center_.x()) / scale_;
  const double v = (x.y() - center_.y()) / scale_;
  return std::pow(u, px_[i]) * std::pow(v, py_[i]);
}

Vec2 CellBasis::grad(int i, const Vec2& x) const {
  const double u = (x.x() - center_.x()) / scale_;
  const double v = (x.y() - center_.y()) / scale_;
  const int a = px_[i], b = py_[i];
  Vec2 g = Vec2::Zero();
  if (a > 0) g.x() = a * std::pow(u, a - 1) * std::pow(v, b) / scale_;
  if (b > 0) g.y() = b * std::pow(u, a) * std::pow(v, b - 1) / scale_;
  return g;
}

Eigen::MatrixXd CellBasis::values(const QuadratureRule& quad) const {
  Eigen::MatrixXd V(quad.size(), dim());
  for (int p = 0; p < quad.size(); ++p)
    for (int i = 0; i < dim(); ++i)
      V(p, i) = eval(i, quad.points[p]);
  return V;
}

void CellBasis::gradients(const QuadratureRule& quad, Eigen::MatrixXd& gx, Eigen::MatrixXd& gy) const {
  gx.resize(quad.size(), dim());
  gy.resize(quad.size(), dim());
  for (int p = 0; p < quad.size(); ++p) {
    for (int i = 0; i < dim(); ++i) {
      const Vec2 g = grad(i, quad.points[p]);
      gx(p, i) = g.x();
      gy(p, i) = g.y();
    }
  }
}

Eigen::MatrixXd CellBasis::mass_matrix(const QuadratureRule& quad) const {
  const Eigen::MatrixXd V = values(quad);
  return V.transpose() * quad.weights.asDiagonal() * V;
}

EdgeBasis::EdgeBasis(int order, const Vec2& a, const Vec2& b)
    : order_(order), midpoint_(0.5 * (a + b)), length_((b - a).norm()) {
  if (order < 0) throw std::invalid_argument("EdgeBasis: order must be >= 0");
  if (length_ <= 0.0) throw std::invalid_argument("EdgeBasis: degenerate edge");
  tangent_ = (b - a) / length_;
}

EdgeBasis::EdgeBasis(const PolygonalMesh& mesh, int edge, int order)
    : EdgeBasis(order, mesh.edge_vertex(edge, 0), mesh.edge_vertex(edge, 1)) {}

double EdgeBasis::eval(int i, const Vec2& x) const {
  const double t = (x - midpoint_).dot(tangent_) / length_;
  return std::pow(t, i);
}

Eigen::MatrixXd EdgeBasis::values(const QuadratureRule& quad) const {
  Eigen::MatrixXd V(quad.size(), dim());
  for (int p = 0; p < quad.size(); ++p)
    for (int i = 0; i < dim(); ++i)
      V(p, i) = eval(i, quad.points[p]);
  return V;
}

Eigen::MatrixXd EdgeBasis::mass_matrix(const QuadratureRule& quad) const {
  const Eigen::MatrixXd V = values(quad);
  return V.transpose() * quad.weights.asDiagonal() * V;
}

}  // namespace hwg
