#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pvsizing/lp_model.hpp"
#include "pvsizing/lp_problem.hpp"

namespace pvsizing::lp {

// CPLEX-LP-style text: Minimize / Subject To / Bounds / End. Equality rows
// precede inequality rows; every variable is listed in Bounds, which fixes the
// column order on re-read. Coefficients carry 17 significant digits.
void write_lp_text(std::ostream& out, const StandardFormLP& lp, const std::vector<std::string>& var_names);
void export_lp_text(const StandardFormLP& lp, const VariableMap& map, const std::filesystem::path& path);

struct ParsedLP {
  StandardFormLP lp;
  std::vector<std::string> var_names;
};

// Reads the subset written above ('>=' rows are negated into A_ub).
// Throws DataError with the line number on malformed input.
ParsedLP read_lp_text(std::istream& in);
ParsedLP read_lp_text(const std::filesystem::path& path);

}  // namespace pvsizing::lp
