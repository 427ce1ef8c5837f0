// Manufactured problem data for the first-order system
//   alpha q + grad u = 0,  div q = f  in Omega,  u = g on the boundary.

#ifndef HWG_PROBLEMS_HPP
#define HWG_PROBLEMS_HPP

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "hwg/mesh.hpp"

namespace hwg {

struct ProblemSpec {
  std::string name;
  /// Symmetric positive definite coefficient at a point.
  std::function<Eigen::Matrix2d(const Vec2&)> alpha;
  std::function<double(const Vec2&)> f;
  std::function<double(const Vec2&)> g;   // Dirichlet trace of u
  // Exact fields, when available (manufactured cases).
  std::function<double(const Vec2&)> exact_u;
  std::function<Vec2(const Vec2&)> exact_q;
  std::function<Vec2(const Vec2&)> exact_grad_u;
};

/// alpha = 1/((1+x)(1+y)), u = sin(pi x) sin(pi y) on the unit square.
ProblemSpec example1();

/// alpha = 1, u = sin(pi x) cos(pi y) on the unit square.
ProblemSpec example2();

/// Lookup by identifier "ex1" | "ex2"; throws on unknown id.
ProblemSpec problem_by_id(const std::string& id);

struct ValidationReport {
  double max_constraint_residual = 0.0;  // alpha q + grad u
  double max_divergence_residual = 0.0;  // div q - f, finite differences
};

/// Samples the manufactured identities at quasi-random interior points of
/// the unit square; divergence is checked by central differences of q with
/// step 1e-5. Report only, never throws on mismatch.
ValidationReport validate(const ProblemSpec& spec, int samples);

}  // namespace hwg

#endif
