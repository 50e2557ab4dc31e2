#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pvsizing/lp_model.hpp"
#include "pvsizing/model.hpp"
#include "pvsizing/simplex.hpp"

namespace pvsizing {

struct GridSpec {
  std::size_t a_points = 81;
  std::size_t c_points = 81;
  double a_max = 100.0;
  double c_max = 1.0;

  double a_step() const { return a_max / static_cast<double>(a_points - 1); }
  double c_step() const { return c_max / static_cast<double>(c_points - 1); }
  double a_at(std::size_t i) const { return a_step() * static_cast<double>(i); }
  double c_at(std::size_t i) const { return c_step() * static_cast<double>(i); }
  void validate() const;
};

// Capacity search cap: twice the largest single-step net surplus at a_max,
// times K/10. Falls back to 1 kWh when no step has a surplus.
double default_c_max(const SizingProblemSpec& spec);
GridSpec default_grid(const SizingProblemSpec& spec, std::size_t a_points = 81, std::size_t c_points = 81);

struct GridResult {
  SolveStatus status = SolveStatus::Infeasible;
  double pv_area = 0.0;
  double capacity = 0.0;
  double cost = 0.0;
  // Original cost at (a_at(i), c_at(j)) stored at [i * c_points + j]; NaN where
  // the ZEH filter excluded the point.
  std::vector<double> surface;
};

// Exhaustive evaluation of the original (saturating) problem over the grid.
// Individual mode only. Ties go to the smaller capacity, then the smaller area.
// `threads` > 1 evaluates rows concurrently; the result does not depend on it.
GridResult grid_search(const SizingProblemSpec& spec, const GridSpec& grid, std::size_t threads = 1);

struct Theorem1Report {
  double lp_objective = 0.0;
  double oracle_cost = 0.0;
  double slack = 0.0;
  double margin = 0.0;  // oracle_cost + slack - lp_objective
  // Original cost of the LP sizing; exceeds lp_objective when the relaxation
  // exploits the extra freedom (possible for Pi_R < 0).
  double simulated_at_lp = 0.0;
  bool passed = false;
  std::string detail;
};

// LP optimum <= oracle optimum + one-cell Lipschitz allowance
//   Pi_PV * da + (Pi_B + K (|Pi_R| + Pi_G)) * dC.
Theorem1Report check_theorem1(const SizingProblemSpec& spec, const GridSpec& grid,
                              const lp::SolverConfig& config = {});

struct GreedyEqualityReport {
  double lp_objective = 0.0;
  double simulated_cost = 0.0;
  double relative_gap = 0.0;
  bool passed = false;
};

// Requires Pi_R > 0 and Pi_G > 0 (ConfigError otherwise).
GreedyEqualityReport check_greedy_equality(const SizingProblemSpec& spec, double tol = 1e-6,
                                           const lp::SolverConfig& config = {});

enum class ShiftKind { Spill, Deficit };

struct PerturbationWitness {
  std::size_t j = 0;  // the shifted pair is (j-1, j)
  ShiftKind kind = ShiftKind::Spill;
  double delta = 0.0;  // -(amount moved from step j to step j-1)
  SizingSolution perturbed;
  double cost_delta = 0.0;           // objective(perturbed) - objective(solution)
  double predicted_cost_delta = 0.0;  // Pi * (1 - retention) * |delta|
};

// Looks for a step j >= 2 with C_j at a capacity bound, the predecessor
// strictly inside the band on the shifted side, no opposite-sign slack at j-1,
// positive slack at j to shift, and all rate rows at j-1 and j strictly slack.
// Moves |delta| of spill (deficit) from step j to step j-1, compensating the
// SoC at j-1 so that C_j is unchanged. |delta| is half the largest feasible
// shift. Throws InternalError if the constructed point fails re-verification.
std::optional<PerturbationWitness> find_perturbation(const SizingSolution& solution,
                                                     const SizingProblemSpec& spec);

struct TimingRow {
  std::size_t num_steps = 0;
  double lp_seconds = 0.0;
  double oracle_seconds = 0.0;
};

// For each horizon K (ascending), truncates the series to K steps, amortizes
// the investment prices to K steps against `reference_days`, and times one LP
// build+solve and one single-threaded grid search.
std::vector<TimingRow> timing_benchmark(const SizingProblemSpec& spec, const std::vector<std::size_t>& horizons,
                                        std::size_t a_points = 81, std::size_t c_points = 81,
                                        double reference_days = 334.0);
void write_timing_csv(const std::vector<TimingRow>& rows, const std::filesystem::path& path);

// First `steps` steps of every series.
SizingProblemSpec truncate(const SizingProblemSpec& spec, std::size_t steps);

}  // namespace pvsizing
