// Text serialization of a discrete solution, round-trip exact (coefficients
// written with full precision).

#ifndef HWG_SOLUTION_IO_HPP
#define HWG_SOLUTION_IO_HPP

#include <iosfwd>
#include <string>

#include "hwg/hybrid_solver.hpp"

namespace hwg {

void write_solution(std::ostream& out, const WGSolution& sol, const std::string& problem_id);
void write_solution_file(const std::string& path, const WGSolution& sol,
                         const std::string& problem_id);

/// Reads a solution written by write_solution; `problem_id` receives the
/// header's problem identifier when non-null.
WGSolution read_solution(std::istream& in, std::string* problem_id = nullptr);
WGSolution read_solution_file(const std::string& path, std::string* problem_id = nullptr);

}  // namespace hwg

#endif
