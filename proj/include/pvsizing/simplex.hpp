#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pvsizing/lp_problem.hpp"
#include "pvsizing/model.hpp"

namespace pvsizing::lp {

enum class PivotRule { Bland, DantzigWithBlandFallback };

struct SolverConfig {
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-9;
  // 0 selects the default of 50 * n_vars.
  std::size_t max_iterations = 0;
  PivotRule pivot_rule = PivotRule::DantzigWithBlandFallback;
  // Basis refactorization period in pivots.
  std::size_t refactor_interval = 100;

  void validate() const;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> primal;
  double objective = 0.0;
  std::size_t iterations = 0;
  double wall_time = 0.0;  // seconds

  // Row duals from the final basis (Lagrange multipliers of A z (=|<=) b) and
  // the matching structural reduced costs c - A'y. Empty unless Optimal.
  std::vector<double> eq_duals;
  std::vector<double> ub_duals;
  std::vector<double> reduced_costs;

  std::size_t bland_pivots = 0;
  std::size_t refactorizations = 0;
};

class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

// Bounded primal revised simplex (two phase, composite phase 1) on a sparse LU
// basis factorization with product-form updates.
SolveOutcome solve(const StandardFormLP& lp, const SolverConfig& config = {});

// Lagrangian dual value of `lp` at the given row multipliers: reduced costs are
// recomputed from the LP data and charged at the bound their sign selects.
// Returns -inf when a reduced cost points at an infinite bound by more than tol.
double dual_objective(const StandardFormLP& lp, std::span<const double> eq_duals,
                      std::span<const double> ub_duals, double tol);

}  // namespace pvsizing::lp
