#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pvsizing/lp_problem.hpp"
#include "pvsizing/model.hpp"
#include "pvsizing/simplex.hpp"

namespace pvsizing {

// Column layout of the sizing LP:
//   [a_1..a_N, Cbar, C_1..C_K, phip_1..phip_K, phim_1..phim_K]
// Steps k are 1-based to match the trajectory notation.
struct VariableMap {
  std::size_t num_areas = 1;
  std::size_t num_steps = 0;

  std::size_t num_vars() const { return num_areas + 1 + 3 * num_steps; }
  std::size_t area(std::size_t i) const { return i; }
  std::size_t cbar() const { return num_areas; }
  std::size_t soc(std::size_t k) const { return num_areas + k; }
  std::size_t spill(std::size_t k) const { return num_areas + num_steps + k; }
  std::size_t deficit(std::size_t k) const { return num_areas + 2 * num_steps + k; }

  // a_i (a_1 for a single area), Cbar, C_k, phip_k, phim_k.
  std::vector<std::string> names() const;
};

struct SizingLP {
  lp::StandardFormLP lp;
  VariableMap map;
};

// Relaxed sizing LP for one household (Individual) or the pooled community.
// Rows: r_dyn_k (equalities), then r_hi_k, r_lo_k, r_rup_k, r_rdn_k per step,
// then r_zeh when enforce_zeh is set.
SizingLP build_lp(const SizingProblemSpec& spec);

// Converts raw solver output into a SizingSolution. The objective is recomputed
// from the prices and must agree with `reported_objective` to 1e-8 relative.
SizingSolution extract_solution(std::span<const double> raw, SolveStatus status, double reported_objective,
                                const VariableMap& map, const SizingProblemSpec& spec);
SizingSolution extract_solution(const lp::SolveOutcome& outcome, const VariableMap& map,
                                const SizingProblemSpec& spec);

// build_lp + solve + extract_solution.
SizingSolution solve_sizing(const SizingProblemSpec& spec, const lp::SolverConfig& config = {});

// Writes the LP point equivalent to a simulated trajectory at (areas, capacity).
std::vector<double> lp_point(std::span<const double> areas, double capacity, const Trajectory& trajectory,
                             const VariableMap& map);

}  // namespace pvsizing
