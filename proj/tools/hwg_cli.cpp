// Command-line front end: mesh generation, single solves, convergence
// studies, and the hybrid-vs-coupled verification.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure,
// 3 verification failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hwg/errors.hpp"
#include "hwg/hybrid_solver.hpp"
#include "hwg/mesh.hpp"
#include "hwg/problems.hpp"
#include "hwg/reference_wg.hpp"
#include "hwg/solution_io.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerification = 3;

std::string fmt_err(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

std::string fmt_rate(const std::optional<double>& r) {
  if (!r) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *r);
  return buf;
}

std::string fmt_h(double h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", h);
  return buf;
}

void emit_table(std::ostream& out, const std::vector<hwg::ErrorReport>& rows,
                const std::string& format) {
  if (format == "md") {
    out << "| h | e_triple | ord | delta | ord | eps_h1 | ord | eps_l2 | ord |\n";
    out << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
      auto rate = [](const std::optional<double>& v) {
        const std::string s = fmt_rate(v);
        return s.empty() ? std::string("-") : s;
      };
      out << "| " << fmt_h(r.h) << " | " << fmt_err(r.triple_e) << " | " << rate(r.rate_triple)
          << " | " << fmt_err(r.delta) << " | " << rate(r.rate_delta) << " | "
          << fmt_err(r.eps_h1) << " | " << rate(r.rate_h1) << " | " << fmt_err(r.eps_l2)
          << " | " << rate(r.rate_l2) << " |\n";
    }
  } else {
    out << "h,e_triple,ord1,delta,ord2,eps_h1,ord3,eps_l2,ord4\n";
    for (const auto& r : rows) {
      out << fmt_h(r.h) << "," << fmt_err(r.triple_e) << "," << fmt_rate(r.rate_triple) << ","
          << fmt_err(r.delta) << "," << fmt_rate(r.rate_delta) << "," << fmt_err(r.eps_h1) << ","
          << fmt_rate(r.rate_h1) << "," << fmt_err(r.eps_l2) << "," << fmt_rate(r.rate_l2)
          << "\n";
    }
  }
}

std::string with_level_suffix(const std::string& path, int level) {
  const auto dot = path.rfind('.');
  const std::string suffix = "_l" + std::to_string(level);
  if (dot == std::string::npos || dot == 0) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

hwg::PolygonalMesh make_mesh(const std::string& kind, int n, int n0, int levels, double rho) {
  if (kind == "tri") return hwg::gen_triangular(n);
  if (kind == "rect") return hwg::gen_rectangular(n);
  if (kind == "quad") return std::move(hwg::gen_quad_family(n0, levels, rho).back());
  throw CLI::ValidationError("--kind", "unknown mesh kind: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybridized weak Galerkin mixed FEM solver for alpha q + grad u = 0, div q = f"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Optional key=value config file; flags override it");

  // --- mesh ---------------------------------------------------------------
  auto* cmd_mesh = app.add_subcommand("mesh", "Generate a mesh file");
  std::string mesh_kind = "tri", mesh_out = "mesh.txt";
  int mesh_n = 4, mesh_n0 = 4, mesh_levels = 1;
  double mesh_rho = 0.0;
  cmd_mesh->add_option("--kind", mesh_kind, "tri|rect|quad")->required();
  cmd_mesh->add_option("--n", mesh_n, "Subdivisions for tri/rect");
  cmd_mesh->add_option("--n0", mesh_n0, "Coarse grid size for quad");
  cmd_mesh->add_option("--levels", mesh_levels, "Refinement levels for quad");
  cmd_mesh->add_option("--rho", mesh_rho, "Interior vertex perturbation in [0, 0.3]");
  cmd_mesh->add_option("--out", mesh_out, "Output path (quad: one file per level)");

  // --- solve --------------------------------------------------------------
  auto* cmd_solve = app.add_subcommand("solve", "Solve a single problem and export the solution");
  std::string solve_kind = "tri", solve_mesh_file, solve_problem = "ex1", solve_out = "solution.txt";
  int solve_n = 4, solve_n0 = 4, solve_levels = 1, solve_k = 0, solve_threads = 1;
  double solve_rho = 0.0;
  cmd_solve->add_option("--kind", solve_kind, "tri|rect|quad");
  cmd_solve->add_option("--mesh", solve_mesh_file, "Mesh file (overrides --kind)");
  cmd_solve->add_option("--n", solve_n, "Subdivisions for tri/rect");
  cmd_solve->add_option("--n0", solve_n0, "Coarse grid size for quad");
  cmd_solve->add_option("--levels", solve_levels, "Refinement levels for quad");
  cmd_solve->add_option("--rho", solve_rho, "Perturbation for quad");
  cmd_solve->add_option("--problem", solve_problem, "ex1|ex2")->required();
  cmd_solve->add_option("--k", solve_k, "Polynomial order (0..2)")->check(CLI::Range(0, 2));
  cmd_solve->add_option("--threads", solve_threads, "Element-loop threads")->check(CLI::PositiveNumber);
  cmd_solve->add_option("--out", solve_out, "Solution output path");

  // --- study --------------------------------------------------------------
  auto* cmd_study = app.add_subcommand("study", "Convergence study over a refinement sequence");
  std::string study_kind = "tri", study_problem = "ex1", study_format = "csv", study_out;
  int study_nstart = 4, study_levels = 6, study_n0 = 4, study_k = 0, study_threads = 1;
  double study_rho = 0.2;
  bool study_alpha_weighted = false, study_interior_jumps = false;
  cmd_study->add_option("--kind", study_kind, "tri|rect|quad")->required();
  cmd_study->add_option("--n-start", study_nstart, "Coarsest n for tri/rect");
  cmd_study->add_option("--levels", study_levels, "Number of levels")->check(CLI::Range(2, 12));
  cmd_study->add_option("--n0", study_n0, "Coarse grid size for quad");
  cmd_study->add_option("--rho", study_rho, "Perturbation for quad");
  cmd_study->add_option("--problem", study_problem, "ex1|ex2")->required();
  cmd_study->add_option("--k", study_k, "Polynomial order (0..2)")->check(CLI::Range(0, 2));
  cmd_study->add_option("--format", study_format, "csv|md");
  cmd_study->add_option("--out", study_out, "Output path (default stdout)");
  cmd_study->add_option("--threads", study_threads, "Element-loop threads")->check(CLI::PositiveNumber);
  cmd_study->add_flag("--alpha-weighted-triple", study_alpha_weighted,
                      "Alpha-weighted flux-norm variant");
  cmd_study->add_flag("--interior-jumps-only", study_interior_jumps,
                      "Exclude boundary traces from the H1 jump sum");

  // --- verify -------------------------------------------------------------
  auto* cmd_verify = app.add_subcommand("verify", "Compare hybrid vs coupled solutions");
  std::string verify_kind = "tri", verify_problem = "ex1";
  int verify_n = 4, verify_n0 = 2, verify_levels = 2, verify_k = 0;
  double verify_rho = 0.2, verify_tol = 1e-9;
  cmd_verify->add_option("--kind", verify_kind, "tri|rect|quad")->required();
  cmd_verify->add_option("--n", verify_n, "Subdivisions for tri/rect");
  cmd_verify->add_option("--n0", verify_n0, "Coarse grid size for quad");
  cmd_verify->add_option("--levels", verify_levels, "Refinement levels for quad");
  cmd_verify->add_option("--rho", verify_rho, "Perturbation for quad");
  cmd_verify->add_option("--problem", verify_problem, "ex1|ex2")->required();
  cmd_verify->add_option("--k", verify_k, "Polynomial order (0..2)")->check(CLI::Range(0, 2));
  cmd_verify->add_option("--tol", verify_tol, "Pass threshold on relative discrepancies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (cmd_mesh->parsed()) {
      if (mesh_kind == "quad") {
        const auto family = hwg::gen_quad_family(mesh_n0, mesh_levels, mesh_rho);
        for (size_t l = 0; l < family.size(); ++l) {
          const std::string path = with_level_suffix(mesh_out, static_cast<int>(l));
          hwg::write_mesh_file(path, family[l]);
          std::cout << path << ": " << family[l].n_cells() << " cells, " << family[l].n_edges()
                    << " edges, " << family[l].n_vertices() << " vertices\n";
        }
      } else {
        const hwg::PolygonalMesh mesh = make_mesh(mesh_kind, mesh_n, mesh_n0, 1, 0.0);
        hwg::write_mesh_file(mesh_out, mesh);
        std::cout << mesh_out << ": " << mesh.n_cells() << " cells, " << mesh.n_edges()
                  << " edges, " << mesh.n_vertices() << " vertices\n";
      }
      return 0;
    }

    if (cmd_solve->parsed()) {
      const hwg::ProblemSpec spec = hwg::problem_by_id(solve_problem);
      std::vector<std::string> warnings;
      const hwg::PolygonalMesh mesh =
          solve_mesh_file.empty()
              ? make_mesh(solve_kind, solve_n, solve_n0, solve_levels, solve_rho)
              : hwg::read_mesh_file(solve_mesh_file, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      const hwg::WGSolution sol = hwg::solve_hwg(mesh, spec, solve_k, solve_threads);
      hwg::write_solution_file(solve_out, sol, solve_problem);
      std::cout << "wrote " << solve_out << " (free multiplier DOFs: "
                << sol.diagnostics.n_free_dofs
                << ", residual: " << sol.diagnostics.relative_residual << ")\n";
      return 0;
    }

    if (cmd_study->parsed()) {
      const hwg::ProblemSpec spec = hwg::problem_by_id(study_problem);
      const auto convention = study_interior_jumps
                                  ? hwg::BoundaryJumpConvention::kInteriorOnly
                                  : hwg::BoundaryJumpConvention::kOneSidedTrace;
      std::vector<hwg::ErrorReport> rows;
      std::vector<hwg::PolygonalMesh> meshes;
      if (study_kind == "quad") {
        meshes = hwg::gen_quad_family(study_n0, study_levels, study_rho);
      } else {
        for (int l = 0; l < study_levels; ++l)
          meshes.push_back(make_mesh(study_kind, study_nstart << l, 0, 1, 0.0));
      }
      for (const auto& mesh : meshes) {
        const hwg::WGSolution sol = hwg::solve_hwg(mesh, spec, study_k, study_threads);
        hwg::ErrorReport rep = hwg::compute_errors(mesh, spec, sol, study_k, convention);
        if (study_alpha_weighted)
          rep.triple_e = hwg::triple_norm_error(mesh, spec, sol, study_k, true);
        rows.push_back(rep);
      }
      hwg::attach_rates(rows);
      if (study_out.empty()) {
        emit_table(std::cout, rows, study_format);
      } else {
        std::ofstream out(study_out);
        if (!out) throw std::runtime_error("cannot open output file: " + study_out);
        emit_table(out, rows, study_format);
      }
      return 0;
    }

    if (cmd_verify->parsed()) {
      const hwg::ProblemSpec spec = hwg::problem_by_id(verify_problem);
      const hwg::PolygonalMesh mesh =
          make_mesh(verify_kind, verify_n, verify_n0, verify_levels, verify_rho);
      const hwg::EquivalenceReport rep = hwg::compare_hybrid_vs_coupled(mesh, spec, verify_k);
      std::cout << "max relative discrepancy: q0 " << fmt_err(rep.max_q0_diff) << ", u "
                << fmt_err(rep.max_u_diff) << ", qb " << fmt_err(rep.max_qb_diff)
                << "; hybrid flux jump " << fmt_err(rep.max_hybrid_qb_jump) << "\n";
      if (rep.pass(verify_tol)) {
        std::cout << "verify: PASS (tolerance " << verify_tol << ")\n";
        return 0;
      }
      std::cout << "verify: FAIL (tolerance " << verify_tol << ")\n";
      return kExitVerification;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
