// Quadrature rules: Gauss-Legendre on segments and centroid-fan rules on
// star-shaped polygonal cells. Rules are immutable values.

#ifndef HWG_QUADRATURE_HPP
#define HWG_QUADRATURE_HPP

#include <vector>

#include <Eigen/Dense>

#include "hwg/mesh.hpp"

namespace hwg {

struct QuadratureRule {
  std::vector<Vec2> points;
  Eigen::VectorXd weights;   // measure-scaled, positive
  int exactness = 0;

  int size() const { return static_cast<int>(points.size()); }
  double total_weight() const { return weights.sum(); }
};

/// Gauss-Legendre nodes/weights on [-1, 1], exact through degree 2n-1.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Rule on the segment [a, b], exact for polynomials up to `degree` in the
/// arc-length coordinate.
QuadratureRule edge_quadrature(const Vec2& a, const Vec2& b, int degree);

/// Rule on a polygon given by `loop`, fan-triangulated from `centroid`,
/// exact for bivariate polynomials up to `degree` on each fan triangle.
/// The polygon must be star-shaped with respect to the centroid.
QuadratureRule cell_quadrature(const std::vector<Vec2>& loop, const Vec2& centroid, int degree);

/// Convenience overload taking a mesh cell.
QuadratureRule cell_quadrature(const PolygonalMesh& mesh, int cell, int degree);

}  // namespace hwg

#endif
