#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "optsmt/sat_solver.hpp"

namespace optsmt::sat {

struct DimacsCnf {
  int num_vars = 0;
  std::vector<std::vector<Lit>> clauses;
};

/// Parses `p cnf` text. DIMACS variable k becomes Var k-1. Throws
/// std::invalid_argument on malformed input.
DimacsCnf parse_dimacs(std::string_view text);

std::string to_dimacs(const DimacsCnf &cnf);

} // namespace optsmt::sat
