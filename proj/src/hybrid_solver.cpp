#include "hwg/hybrid_solver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace hwg {

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int nthreads = std::min(threads, n);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

}  // namespace

SchurSystem assemble_schur(const PolygonalMesh& mesh, const ProblemSpec& spec, int k,
                           int threads) {
  const int modes = k + 1;
  SchurSystem sys;
  sys.k = k;
  sys.n_dofs = mesh.n_edges() * modes;
  sys.free_index.assign(sys.n_dofs, -1);
  sys.constrained_values = Eigen::VectorXd::Zero(sys.n_dofs);

  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (mesh.is_boundary_edge(e)) {
      const Eigen::VectorXd gb = project_edge(mesh, e, spec.g, k);
      sys.constrained_values.segment(e * modes, modes) = gb;
    } else {
      for (int j = 0; j < modes; ++j) sys.free_index[e * modes + j] = sys.n_free++;
    }
  }

  sys.local.resize(mesh.n_cells());
  parallel_for(mesh.n_cells(), threads, [&](int c) {
    sys.local[c] = build_local_system(ElementContext(mesh, c, k), spec);
  });

  std::vector<Eigen::Triplet<double>> triplets;
  sys.rhs = Eigen::VectorXd::Zero(sys.n_free);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& edges = mesh.cell_edges()[c];
    const LocalSystem& loc = sys.local[c];
    const int ne = static_cast<int>(edges.size());
    std::vector<int> gdof(loc.nlam);
    for (int le = 0; le < ne; ++le)
      for (int j = 0; j < modes; ++j)
        gdof[le * modes + j] = edges[le] * modes + j;

    for (int i = 0; i < loc.nlam; ++i) {
      const int gi = sys.free_index[gdof[i]];
      if (gi < 0) continue;
      sys.rhs[gi] += loc.rhs_trace[i];
      for (int j = 0; j < loc.nlam; ++j) {
        const int gj = sys.free_index[gdof[j]];
        if (gj >= 0)
          triplets.emplace_back(gi, gj, loc.schur(i, j));
        else
          sys.rhs[gi] -= loc.schur(i, j) * sys.constrained_values[gdof[j]];
      }
    }
  }
  sys.matrix.resize(sys.n_free, sys.n_free);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

Eigen::VectorXd solve_schur(const SchurSystem& sys, SolverDiagnostics* diag) {
  Eigen::VectorXd lambda = sys.constrained_values;
  if (diag) diag->n_free_dofs = sys.n_free;
  if (sys.n_free == 0) return lambda;

  Eigen::VectorXd x;
  bool iterative = false;
  int iterations = 0;
  if (sys.n_free <= 200000) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.matrix);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any())
      throw std::runtime_error("Schur factorization failed or produced nonpositive pivots "
                               "(assembly is not SPD)");
    x = ldlt.solve(sys.rhs);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg(sys.matrix);
    cg.setTolerance(1e-12);
    cg.setMaxIterations(10 * sys.n_free);
    x = cg.solve(sys.rhs);
    if (cg.info() != Eigen::Success)
      throw std::runtime_error("conjugate gradients failed to converge on the Schur system");
    iterative = true;
    iterations = static_cast<int>(cg.iterations());
  }

  const double rhs_norm = sys.rhs.norm();
  const double resid = (sys.matrix * x - sys.rhs).norm() / (rhs_norm > 0.0 ? rhs_norm : 1.0);
  if (resid > 1e-10)
    throw std::runtime_error("Schur solve residual " + std::to_string(resid) + " exceeds 1e-10");
  if (diag) {
    diag->relative_residual = resid;
    diag->used_iterative = iterative;
    diag->iterations = iterations;
  }

  for (int d = 0; d < sys.n_dofs; ++d)
    if (sys.free_index[d] >= 0) lambda[d] = x[sys.free_index[d]];
  return lambda;
}

WGSolution recover_local(const PolygonalMesh& mesh, const SchurSystem& sys,
                         const Eigen::VectorXd& lambda, int threads) {
  const int modes = sys.k + 1;
  WGSolution sol;
  sol.k = sys.k;
  sol.q0.resize(mesh.n_cells());
  sol.qb.resize(mesh.n_cells());
  sol.u.resize(mesh.n_cells());
  sol.lambda.resize(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) sol.lambda[e] = lambda.segment(e * modes, modes);

  parallel_for(mesh.n_cells(), threads, [&](int c) {
    const LocalSystem& loc = sys.local[c];
    const auto& edges = mesh.cell_edges()[c];
    Eigen::VectorXd lambda_local(loc.nlam);
    for (int le = 0; le < static_cast<int>(edges.size()); ++le)
      lambda_local.segment(le * modes, modes) = sol.lambda[edges[le]];
    const Eigen::VectorXd x = loc.recover(lambda_local);
    const int dim_pk = (sys.k + 1) * (sys.k + 2) / 2;
    sol.q0[c] = x.head(2 * dim_pk);
    sol.qb[c].resize(edges.size());
    for (int le = 0; le < static_cast<int>(edges.size()); ++le)
      sol.qb[c][le] = x.segment(2 * dim_pk + le * modes, modes);
    sol.u[c] = x.segment(loc.nq, loc.nu);
  });
  return sol;
}

WGSolution solve_hwg(const PolygonalMesh& mesh, const ProblemSpec& spec, int k, int threads) {
  SolverDiagnostics diag;
  double t0 = now_seconds();
  SchurSystem sys = assemble_schur(mesh, spec, k, threads);
  diag.assemble_seconds = now_seconds() - t0;
  t0 = now_seconds();
  const Eigen::VectorXd lambda = solve_schur(sys, &diag);
  diag.solve_seconds = now_seconds() - t0;

  WGSolution sol = recover_local(mesh, sys, lambda, threads);
  sol.diagnostics = diag;

  // Local conservation: the recovered flux satisfies B q = f-moments on
  // every element.
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalSystem& loc = sys.local[c];
    Eigen::VectorXd q(loc.nq);
    const int dim_pk = (k + 1) * (k + 2) / 2;
    q.head(2 * dim_pk) = sol.q0[c];
    for (int le = 0; le < static_cast<int>(sol.qb[c].size()); ++le)
      q.segment(2 * dim_pk + le * (k + 1), k + 1) = sol.qb[c][le];
    const double resid = (loc.B * q - loc.f_moments).norm();
    if (resid > 1e-10 * (1.0 + loc.f_moments.norm()))
      throw std::runtime_error("local conservation violated on cell " + std::to_string(c));
  }
  return sol;
}

double max_flux_jump(const PolygonalMesh& mesh, const WGSolution& sol) {
  double worst = 0.0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (mesh.is_boundary_edge(e)) continue;
    const auto cells = mesh.edge_cells()[e];
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(sol.k + 1);
    for (int which = 0; which < 2; ++which) {
      const int c = cells[which];
      const auto& ce = mesh.cell_edges()[c];
      for (int le = 0; le < static_cast<int>(ce.size()); ++le)
        if (ce[le] == e) sum += sol.qb[c][le];
    }
    const EdgeBasis basis(mesh, e, sol.k);
    const QuadratureRule quad =
        edge_quadrature(mesh.edge_vertex(e, 0), mesh.edge_vertex(e, 1), 2 * sol.k);
    const Eigen::MatrixXd M = basis.mass_matrix(quad);
    worst = std::max(worst, std::sqrt(std::max(0.0, sum.dot(M * sum))));
  }
  return worst;
}

}  // namespace hwg
