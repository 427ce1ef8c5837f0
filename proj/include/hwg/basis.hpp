// Scaled monomial bases on cells and edges. Cell bases are monomials in
// ((x - x_T)/h_T, (y - y_T)/h_T); edge bases are monomials in the
// arc-length coordinate centered at the edge midpoint and scaled by the
// edge length.

#ifndef HWG_BASIS_HPP
#define HWG_BASIS_HPP

#include <Eigen/Dense>

#include "hwg/mesh.hpp"
#include "hwg/quadrature.hpp"

namespace hwg {

constexpr int poly_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

class CellBasis {
public:
  CellBasis(int degree, const Vec2& center, double scale);
  CellBasis(const PolygonalMesh& mesh, int cell, int degree);

  int degree() const { return degree_; }
  int dim() const { return poly_dim(degree_); }
  const Vec2& center() const { return center_; }
  double scale() const { return scale_; }

  double eval(int i, const Vec2& x) const;
  Vec2 grad(int i, const Vec2& x) const;

  /// Values of all basis functions at the quadrature points, one row per
  /// point.
  Eigen::MatrixXd values(const QuadratureRule& quad) const;
  /// Gradient components at the quadrature points (rows = points).
  void gradients(const QuadratureRule& quad, Eigen::MatrixXd& gx, Eigen::MatrixXd& gy) const;
  /// Mass matrix under the given rule.
  Eigen::MatrixXd mass_matrix(const QuadratureRule& quad) const;

private:
  int degree_;
  Vec2 center_;
  double scale_;
  // monomial exponents per basis index
  std::vector<int> px_, py_;
};

class EdgeBasis {
public:
  /// Basis on the segment a -> b (canonical direction), order k.
  EdgeBasis(int order, const Vec2& a, const Vec2& b);
  EdgeBasis(const PolygonalMesh& mesh, int edge, int order);

  int order() const { return order_; }
  int dim() const { return order_ + 1; }

  double eval(int i, const Vec2& x) const;
  Eigen::MatrixXd values(const QuadratureRule& quad) const;
  Eigen::MatrixXd mass_matrix(const QuadratureRule& quad) const;

private:
  int order_;
  Vec2 midpoint_;
  Vec2 tangent_;
  double length_;
};

}  // namespace hwg

#endif
