#include "hwg/solution_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hwg {

namespace {

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  for (int i = 0; i < v.size(); ++i) out << " " << v[i];
}

Eigen::VectorXd read_vector(std::istringstream& ss, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    ss >> v[i];
    if (ss.fail()) throw std::runtime_error("solution parse error: expected " +
                                            std::to_string(n) + " coefficients");
  }
  return v;
}

}  // namespace

void write_solution(std::ostream& out, const WGSolution& sol, const std::string& problem_id) {
  out.precision(17);
  out << "hwg-solution 1\n";
  out << "k " << sol.k << "\n";
  out << "problem " << problem_id << "\n";
  out << "cells " << sol.u.size() << "\n";
  out << "edges " << sol.lambda.size() << "\n";
  for (size_t c = 0; c < sol.u.size(); ++c) {
    out << "cell " << c << " " << sol.qb[c].size() << "\n";
    out << "u";
    write_vector(out, sol.u[c]);
    out << "\nq0";
    write_vector(out, sol.q0[c]);
    out << "\n";
    for (size_t le = 0; le < sol.qb[c].size(); ++le) {
      out << "qb " << le;
      write_vector(out, sol.qb[c][le]);
      out << "\n";
    }
  }
  for (size_t e = 0; e < sol.lambda.size(); ++e) {
    out << "lambda " << e;
    write_vector(out, sol.lambda[e]);
    out << "\n";
  }
  const auto& d = sol.diagnostics;
  out << "diag free_dofs " << d.n_free_dofs << " residual " << d.relative_residual
      << " iterative " << (d.used_iterative ? 1 : 0) << " iterations " << d.iterations
      << " assemble_s " << d.assemble_seconds << " solve_s " << d.solve_seconds << "\n";
}

void write_solution_file(const std::string& path, const WGSolution& sol,
                         const std::string& problem_id) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_solution(out, sol, problem_id);
}

WGSolution read_solution(std::istream& in, std::string* problem_id) {
  std::string line, kw;
  WGSolution sol;
  int n_cells = 0, n_edges = 0;

  auto expect_line = [&in, &line](const char* what) {
    if (!std::getline(in, line))
      throw std::runtime_error(std::string("solution parse error: missing ") + what);
    return std::istringstream(line);
  };

  {
    auto ss = expect_line("header");
    int version = 0;
    ss >> kw >> version;
    if (kw != "hwg-solution" || version != 1)
      throw std::runtime_error("solution parse error: bad header");
  }
  {
    auto ss = expect_line("k");
    ss >> kw >> sol.k;
  }
  if (problem_id) {
    auto ss = expect_line("problem");
    ss >> kw >> *problem_id;
  } else {
    expect_line("problem");
  }
  {
    auto ss = expect_line("cells");
    ss >> kw >> n_cells;
  }
  {
    auto ss = expect_line("edges");
    ss >> kw >> n_edges;
  }

  const int modes = sol.k + 1;
  const int dim_pk = (sol.k + 1) * (sol.k + 2) / 2;
  const int dim_pk1 = (sol.k + 2) * (sol.k + 3) / 2;
  sol.q0.resize(n_cells);
  sol.qb.resize(n_cells);
  sol.u.resize(n_cells);
  sol.lambda.resize(n_edges);

  for (int c = 0; c < n_cells; ++c) {
    int idx = 0, ne = 0;
    {
      auto ss = expect_line("cell");
      ss >> kw >> idx >> ne;
      if (kw != "cell" || idx != c) throw std::runtime_error("solution parse error: cell order");
    }
    {
      auto ss = expect_line("u");
      ss >> kw;
      sol.u[c] = read_vector(ss, dim_pk1);
    }
    {
      auto ss = expect_line("q0");
      ss >> kw;
      sol.q0[c] = read_vector(ss, 2 * dim_pk);
    }
    sol.qb[c].resize(ne);
    for (int le = 0; le < ne; ++le) {
      auto ss = expect_line("qb");
      int lidx = 0;
      ss >> kw >> lidx;
      sol.qb[c][le] = read_vector(ss, modes);
    }
  }
  for (int e = 0; e < n_edges; ++e) {
    auto ss = expect_line("lambda");
    int idx = 0;
    ss >> kw >> idx;
    sol.lambda[e] = read_vector(ss, modes);
  }
  if (std::getline(in, line)) {
    std::istringstream ss(line);
    ss >> kw;
    if (kw == "diag") {
      auto& d = sol.diagnostics;
      int it = 0;
      ss >> kw >> d.n_free_dofs >> kw >> d.relative_residual >> kw >> it >> kw >>
          d.iterations >> kw >> d.assemble_seconds >> kw >> d.solve_seconds;
      d.used_iterative = (it != 0);
    }
  }
  return sol;
}

WGSolution read_solution_file(const std::string& path, std::string* problem_id) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open solution file: " + path);
  return read_solution(in, problem_id);
}

}  // namespace hwg
