// Error norms against edge/cell projections of the exact solution, and
// convergence rates between refinement levels.

#ifndef HWG_ERRORS_HPP
#define HWG_ERRORS_HPP

#include <optional>
#include <vector>

#include "hwg/hybrid_solver.hpp"
#include "hwg/mesh.hpp"
#include "hwg/problems.hpp"

namespace hwg {

/// Boundary treatment for the jump sum of the discrete H1 norm.
enum class BoundaryJumpConvention {
  kOneSidedTrace,   // boundary edges contribute the one-sided trace
  kInteriorOnly,    // jumps over interior edges only
};

struct ErrorReport {
  double h = 0.0;
  double triple_e = 0.0;   // ||| e_h |||
  double delta = 0.0;      // || delta_h ||
  double eps_h1 = 0.0;     // || eps_h ||_{1,h}
  double eps_l2 = 0.0;     // || eps_h ||
  std::optional<double> rate_triple, rate_delta, rate_h1, rate_l2;
};

/// Flux error: sum over cells of the interior L2 error of e0 plus
/// h_T-weighted boundary mismatch |e0.n - eb|^2. Unweighted volume term;
/// set `alpha_weighted` for the diagnostic a_s-style variant.
double triple_norm_error(const PolygonalMesh& mesh, const ProblemSpec& spec,
                         const WGSolution& sol, int k, bool alpha_weighted = false);

double h1_norm_error(const PolygonalMesh& mesh, const ProblemSpec& spec, const WGSolution& sol,
                     int k,
                     BoundaryJumpConvention convention = BoundaryJumpConvention::kOneSidedTrace);

double l2_norm_error(const PolygonalMesh& mesh, const ProblemSpec& spec, const WGSolution& sol,
                     int k);

/// h_T-weighted distance between the multiplier and the edge projection of
/// u, interior edges only (counted once per adjacent cell).
double multiplier_norm_error(const PolygonalMesh& mesh, const ProblemSpec& spec,
                             const WGSolution& sol, int k);

ErrorReport compute_errors(const PolygonalMesh& mesh, const ProblemSpec& spec,
                           const WGSolution& sol, int k,
                           BoundaryJumpConvention convention = BoundaryJumpConvention::kOneSidedTrace);

/// rate_i = ln(v_{i-1}/v_i) / ln(h_{i-1}/h_i); filled in-place across a
/// refinement sequence.
void attach_rates(std::vector<ErrorReport>& reports);

/// Standalone rate computation; entry 0 is NaN.
std::vector<double> rates(const std::vector<std::pair<double, double>>& h_and_value);

}  // namespace hwg

#endif
