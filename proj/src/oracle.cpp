#include "pvsizing/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "pvsizing/battery_sim.hpp"

namespace pvsizing {

void GridSpec::validate() const {
  if (a_points < 2 || c_points < 2) throw ConfigError("grid needs at least 2 points per axis");
  if (!(a_max > 0.0) || !(c_max > 0.0) || !std::isfinite(a_max) || !std::isfinite(c_max)) {
    throw ConfigError("grid ranges must be nonempty and finite");
  }
}

double default_c_max(const SizingProblemSpec& spec) {
  double surplus = 0.0;
  for (std::size_t k = 0; k < spec.num_steps(); ++k) {
    double net = 0.0;
    for (const auto& h : spec.households) net += spec.a_max * h.pv_yield[k] - h.consumption[k];
    surplus = std::max(surplus, net);
  }
  const double c = 2.0 * surplus * static_cast<double>(spec.num_steps()) / 10.0;
  return c > 0.0 ? c : 1.0;
}

GridSpec default_grid(const SizingProblemSpec& spec, std::size_t a_points, std::size_t c_points) {
  return {a_points, c_points, spec.a_max, default_c_max(spec)};
}

GridResult grid_search(const SizingProblemSpec& spec, const GridSpec& grid, std::size_t threads) {
  if (spec.mode != Mode::Individual) throw ConfigError("grid_search supports Individual mode only");
  spec.validate();
  grid.validate();
  if (grid.a_max > spec.a_max) throw ConfigError("grid area range exceeds a_max");

  const auto& h = spec.households.front();
  const double yield = h.total_yield();
  const double demand = h.total_consumption();
  GridResult out;
  out.surface.assign(grid.a_points * grid.c_points, std::nan(""));

  const auto eval_row = [&](std::size_t i) {
    const double a = grid.a_at(i);
    if (spec.enforce_zeh && a * yield < demand) return;
    const double areas[1] = {a};
    for (std::size_t j = 0; j < grid.c_points; ++j) {
      out.surface[i * grid.c_points + j] = simulate(areas, grid.c_at(j), spec).original_cost;
    }
  };
  threads = std::max<std::size_t>(threads, 1);
  if (threads == 1) {
    for (std::size_t i = 0; i < grid.a_points; ++i) eval_row(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < grid.a_points; i += threads) eval_row(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Capacity-major scan with a strict comparison keeps the first minimum.
  bool found = false;
  for (std::size_t j = 0; j < grid.c_points; ++j) {
    for (std::size_t i = 0; i < grid.a_points; ++i) {
      const double v = out.surface[i * grid.c_points + j];
      if (std::isnan(v)) continue;
      if (!found || v < out.cost) {
        found = true;
        out.cost = v;
        out.pv_area = grid.a_at(i);
        out.capacity = grid.c_at(j);
      }
    }
  }
  out.status = found ? SolveStatus::Optimal : SolveStatus::Infeasible;
  return out;
}

Theorem1Report check_theorem1(const SizingProblemSpec& spec, const GridSpec& grid, const lp::SolverConfig& config) {
  Theorem1Report r;
  const auto sol = solve_sizing(spec, config);
  const auto oracle = grid_search(spec, grid);
  const auto& p = spec.prices;
  r.slack = p.pi_pv * grid.a_step() +
            (p.pi_b + static_cast<double>(spec.num_steps()) * (std::abs(p.pi_r) + p.pi_g)) * grid.c_step();
  if (oracle.status != SolveStatus::Optimal) {
    // No grid point satisfies ZEH; the bound is vacuous.
    r.lp_objective = sol.objective;
    r.oracle_cost = std::nan("");
    r.passed = true;
    r.detail = "oracle infeasible on the grid";
    return r;
  }
  if (!sol.optimal()) {
    r.passed = false;
    r.detail = std::string("LP status ") + to_string(sol.status) + " with a feasible grid point";
    return r;
  }
  r.lp_objective = sol.objective;
  r.oracle_cost = oracle.cost;
  r.margin = oracle.cost + r.slack - sol.objective;
  r.simulated_at_lp = simulate(sol.pv_area, sol.capacity, spec).original_cost;
  r.passed = r.margin >= 0.0;
  return r;
}

GreedyEqualityReport check_greedy_equality(const SizingProblemSpec& spec, double tol,
                                           const lp::SolverConfig& config) {
  if (!(spec.prices.pi_r > 0.0) || !(spec.prices.pi_g > 0.0)) {
    throw ConfigError("greedy equality requires pi_r > 0 and pi_g > 0");
  }
  GreedyEqualityReport r;
  const auto sol = solve_sizing(spec, config);
  if (!sol.optimal()) throw InvalidState(std::string("greedy equality: LP status ") + to_string(sol.status));
  r.lp_objective = sol.objective;
  r.simulated_cost = simulate(sol.pv_area, sol.capacity, spec).original_cost;
  r.relative_gap = std::abs(r.simulated_cost - r.lp_objective) / (1.0 + std::abs(r.lp_objective));
  r.passed = r.relative_gap <= tol;
  return r;
}

std::optional<PerturbationWitness> find_perturbation(const SizingSolution& s, const SizingProblemSpec& spec) {
  if (!s.optimal()) throw InvalidState("find_perturbation requires an optimal solution");
  const auto& b = spec.battery;
  const auto& t = s.trajectory;
  const std::size_t steps = t.spill.size();
  const double cap = s.capacity;
  const double lo = b.alpha_lo * cap;
  const double hi = b.alpha_hi * cap;
  const double rate = b.rate_frac * cap;
  const double tol = 1e-9 * (1.0 + cap);
  if (!(hi - lo > tol)) return std::nullopt;

  // soc index k is C_k; spill/deficit index k-1 is phi_k.
  const auto rup_slack = [&](std::size_t k) { return rate - (t.soc[k] - t.soc[k - 1]); };
  const auto rdn_slack = [&](std::size_t k) { return rate - (t.soc[k - 1] - t.soc[k]); };

  for (std::size_t j = 2; j <= steps; ++j) {
    const double c_prev = t.soc[j - 1];
    const double c_j = t.soc[j];
    const bool rates_slack = rup_slack(j - 1) > tol && rdn_slack(j - 1) > tol && rup_slack(j) > tol &&
                             rdn_slack(j) > tol;
    if (!rates_slack) continue;

    ShiftKind kind;
    double d_max;
    if (std::abs(c_j - hi) <= tol && c_prev > lo + tol && c_prev <= hi + tol && t.deficit[j - 2] <= tol &&
        t.spill[j - 1] > tol) {
      kind = ShiftKind::Spill;
      d_max = std::min({t.spill[j - 1] / b.retention, c_prev - lo, rdn_slack(j - 1), rup_slack(j)});
    } else if (std::abs(c_j - lo) <= tol && c_prev >= lo - tol && c_prev < hi - tol && t.spill[j - 2] <= tol &&
               t.deficit[j - 1] > tol) {
      kind = ShiftKind::Deficit;
      d_max = std::min({t.deficit[j - 1] / b.retention, hi - c_prev, rup_slack(j - 1), rdn_slack(j)});
    } else {
      continue;
    }
    const double d = 0.5 * d_max;
    if (!(d > 0.0)) continue;

    PerturbationWitness w;
    w.j = j;
    w.kind = kind;
    w.delta = -d;
    w.perturbed = s;
    auto& pt = w.perturbed.trajectory;
    if (kind == ShiftKind::Spill) {
      pt.soc[j - 1] -= d;
      pt.spill[j - 2] += d;
      pt.spill[j - 1] -= b.retention * d;
      w.predicted_cost_delta = spec.prices.pi_r * (1.0 - b.retention) * d;
    } else {
      pt.soc[j - 1] += d;
      pt.deficit[j - 2] += d;
      pt.deficit[j - 1] -= b.retention * d;
      w.predicted_cost_delta = spec.prices.pi_g * (1.0 - b.retention) * d;
    }

    const auto built = build_lp(spec);
    const auto z0 = lp_point(s.pv_area, s.capacity, s.trajectory, built.map);
    const auto z1 = lp_point(w.perturbed.pv_area, w.perturbed.capacity, pt, built.map);
    const double violation = built.lp.max_violation(z1);
    if (violation > 1e-9) {
      std::ostringstream os;
      os << "perturbation at j=" << j << " violates the LP by " << violation;
      throw InternalError(os.str());
    }
    w.cost_delta = built.lp.objective(z1) - built.lp.objective(z0);
    w.perturbed.objective = s.objective + w.cost_delta;
    const double scale = 1e-9 * (1.0 + std::abs(s.objective));
    if (std::abs(w.cost_delta - w.predicted_cost_delta) > scale) {
      std::ostringstream os;
      os << "perturbation at j=" << j << " changes the cost by " << w.cost_delta << ", expected "
         << w.predicted_cost_delta;
      throw InternalError(os.str());
    }
    return w;
  }
  return std::nullopt;
}

SizingProblemSpec truncate(const SizingProblemSpec& spec, std::size_t steps) {
  if (steps < 1 || steps > spec.num_steps()) throw ConfigError("truncation horizon outside the series");
  SizingProblemSpec out = spec;
  out.grid.num_steps = steps;
  for (auto& h : out.households) {
    h.consumption.resize(steps);
    h.pv_yield.resize(steps);
  }
  return out;
}

std::vector<TimingRow> timing_benchmark(const SizingProblemSpec& spec, const std::vector<std::size_t>& horizons,
                                        std::size_t a_points, std::size_t c_points, double reference_days) {
  if (!std::is_sorted(horizons.begin(), horizons.end())) throw ConfigError("benchmark horizons must be ascending");
  using clock = std::chrono::steady_clock;
  std::vector<TimingRow> rows;
  for (std::size_t k : horizons) {
    auto sub = truncate(spec, k);
    sub.prices = amortize(spec.prices, static_cast<double>(k) * spec.grid.step_hours / 24.0, reference_days);
    TimingRow row;
    row.num_steps = k;

    const auto t0 = clock::now();
    const auto sol = solve_sizing(sub);
    const auto t1 = clock::now();
    if (!sol.optimal()) throw InvalidState("benchmark LP did not solve to optimality");
    grid_search(sub, default_grid(sub, a_points, c_points), 1);
    const auto t2 = clock::now();

    row.lp_seconds = std::chrono::duration<double>(t1 - t0).count();
    row.oracle_seconds = std::chrono::duration<double>(t2 - t1).count();
    rows.push_back(row);
  }
  return rows;
}

void write_timing_csv(const std::vector<TimingRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "K,lp_seconds,oracle_seconds\n";
  out.precision(9);
  for (const auto& r : rows) out << r.num_steps << ',' << r.lp_seconds << ',' << r.oracle_seconds << '\n';
  out.flush();
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace pvsizing
