#include "hwg/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace hwg {

ProblemSpec example1() {
  ProblemSpec spec;
  spec.name = "ex1";
  spec.alpha = [](const Vec2& p) {
    return Eigen::Matrix2d(Eigen::Matrix2d::Identity() / ((1.0 + p.x()) * (1.0 + p.y())));
  };
  spec.exact_u = [](const Vec2& p) { return std::sin(M_PI * p.x()) * std::sin(M_PI * p.y()); };
  spec.exact_grad_u = [](const Vec2& p) {
    return Vec2(M_PI * std::cos(M_PI * p.x()) * std::sin(M_PI * p.y()),
                M_PI * std::sin(M_PI * p.x()) * std::cos(M_PI * p.y()));
  };
  // q = -alpha^{-1} grad u = -(1+x)(1+y) grad u
  spec.exact_q = [g = spec.exact_grad_u](const Vec2& p) {
    return Vec2(-(1.0 + p.x()) * (1.0 + p.y()) * g(p));
  };
  // f = div q, expanded in closed form.
  spec.f = [](const Vec2& p) {
    const double sx = std::sin(M_PI * p.x()), cx = std::cos(M_PI * p.x());
    const double sy = std::sin(M_PI * p.y()), cy = std::cos(M_PI * p.y());
    const double X = 1.0 + p.x(), Y = 1.0 + p.y();
    return -M_PI * (Y * sy * (cx - M_PI * X * sx) + X * sx * (cy - M_PI * Y * sy));
  };
  spec.g = spec.exact_u;
  return spec;
}

ProblemSpec example2() {
  ProblemSpec spec;
  spec.name = "ex2";
  spec.alpha = [](const Vec2&) { return Eigen::Matrix2d(Eigen::Matrix2d::Identity()); };
  spec.exact_u = [](const Vec2& p) { return std::sin(M_PI * p.x()) * std::cos(M_PI * p.y()); };
  spec.exact_grad_u = [](const Vec2& p) {
    return Vec2(M_PI * std::cos(M_PI * p.x()) * std::cos(M_PI * p.y()),
                -M_PI * std::sin(M_PI * p.x()) * std::sin(M_PI * p.y()));
  };
  spec.exact_q = [g = spec.exact_grad_u](const Vec2& p) { return Vec2(-g(p)); };
  spec.f = [](const Vec2& p) {
    return 2.0 * M_PI * M_PI * std::sin(M_PI * p.x()) * std::cos(M_PI * p.y());
  };
  spec.g = spec.exact_u;
  return spec;
}

ProblemSpec problem_by_id(const std::string& id) {
  if (id == "ex1") return example1();
  if (id == "ex2") return example2();
  throw std::invalid_argument("unknown problem id: " + id);
}

ValidationReport validate(const ProblemSpec& spec, int samples) {
  ValidationReport rep;
  // Halton points in (0,1)^2, pulled away from the boundary for the
  // finite-difference stencil.
  auto halton = [](int index, int base) {
    double f = 1.0, r = 0.0;
    for (int i = index; i > 0; i /= base) {
      f /= base;
      r += f * (i % base);
    }
    return r;
  };
  const double step = 1e-5;
  for (int s = 1; s <= samples; ++s) {
    Vec2 p(halton(s, 2), halton(s, 3));
    p = Vec2(0.01, 0.01) + 0.98 * p;
    if (spec.exact_q && spec.exact_grad_u) {
      const Vec2 res = spec.alpha(p) * spec.exact_q(p) + spec.exact_grad_u(p);
      rep.max_constraint_residual = std::max(rep.max_constraint_residual, res.norm());
    }
    if (spec.exact_q && spec.f) {
      const double div =
          (spec.exact_q(p + Vec2(step, 0.0)).x() - spec.exact_q(p - Vec2(step, 0.0)).x() +
           spec.exact_q(p + Vec2(0.0, step)).y() - spec.exact_q(p - Vec2(0.0, step)).y()) /
          (2.0 * step);
      rep.max_divergence_residual =
          std::max(rep.max_divergence_residual, std::abs(div - spec.f(p)));
    }
  }
  return rep;
}

}  // namespace hwg
