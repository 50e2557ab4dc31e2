#include "pvsizing/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pvsizing {

using lp::Entry;

std::vector<std::string> VariableMap::names() const {
  std::vector<std::string> out;
  out.reserve(num_vars());
  for (std::size_t i = 0; i < num_areas; ++i) out.push_back("a_" + std::to_string(i + 1));
  out.push_back("Cbar");
  for (const char* prefix : {"C_", "phip_", "phim_"}) {
    for (std::size_t k = 1; k <= num_steps; ++k) out.push_back(prefix + std::to_string(k));
  }
  return out;
}

SizingLP build_lp(const SizingProblemSpec& spec) {
  if (spec.num_steps() == 0) throw DataError("cannot build an LP from zero-length series");
  for (const auto& h : spec.households) {
    if (h.consumption.empty()) throw DataError("cannot build an LP from zero-length series");
  }
  spec.validate();
  require_valid_prices(spec.prices);

  const std::size_t n_areas = spec.num_areas();
  const std::size_t steps = spec.num_steps();
  const auto& b = spec.battery;
  const auto& p = spec.prices;

  SizingLP out;
  VariableMap& m = out.map;
  m.num_areas = n_areas;
  m.num_steps = steps;
  const std::size_t n = m.num_vars();

  lp::StandardFormLP& lp = out.lp;
  lp.cost.assign(n, 0.0);
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, lp::kInf);
  lp.a_eq = lp::SparseMatrix(n);
  lp.a_ub = lp::SparseMatrix(n);

  for (std::size_t i = 0; i < n_areas; ++i) {
    lp.cost[m.area(i)] = p.pi_pv;
    lp.upper[m.area(i)] = spec.a_max;
  }
  lp.cost[m.cbar()] = p.pi_b;
  for (std::size_t k = 1; k <= steps; ++k) {
    lp.cost[m.spill(k)] = p.pi_r;
    lp.cost[m.deficit(k)] = p.pi_g;
    lp.lower[m.soc(k)] = -lp::kInf;
  }

  // Series feeding area column i: the household's own yield in Community mode,
  // the single household otherwise.
  const auto& hh = spec.households;
  std::vector<Entry> row;
  for (std::size_t k = 1; k <= steps; ++k) {
    row.clear();
    row.push_back({m.soc(k), 1.0});
    row.push_back({m.spill(k), 1.0});
    row.push_back({m.deficit(k), -1.0});
    if (k == 1) {
      row.push_back({m.cbar(), -b.retention * b.init_frac});
    } else {
      row.push_back({m.soc(k - 1), -b.retention});
    }
    double demand = 0.0;
    for (std::size_t i = 0; i < hh.size(); ++i) {
      const std::size_t col = m.area(spec.mode == Mode::Individual ? 0 : i);
      row.push_back({col, -hh[i].pv_yield[k - 1]});
      demand += hh[i].consumption[k - 1];
    }
    lp.a_eq.append_row(row);
    lp.b_eq.push_back(-demand);
    lp.eq_names.push_back("r_dyn_" + std::to_string(k));
  }

  const auto add_ub = [&](std::vector<Entry> entries, std::string name) {
    lp.a_ub.append_row(std::move(entries));
    lp.b_ub.push_back(0.0);
    lp.ub_names.push_back(std::move(name));
  };
  for (std::size_t k = 1; k <= steps; ++k) {
    const std::string tag = std::to_string(k);
    add_ub({{m.soc(k), 1.0}, {m.cbar(), -b.alpha_hi}}, "r_hi_" + tag);
    add_ub({{m.soc(k), -1.0}, {m.cbar(), b.alpha_lo}}, "r_lo_" + tag);
    if (k == 1) {
      add_ub({{m.soc(1), 1.0}, {m.cbar(), -b.init_frac - b.rate_frac}}, "r_rup_" + tag);
      add_ub({{m.soc(1), -1.0}, {m.cbar(), b.init_frac - b.rate_frac}}, "r_rdn_" + tag);
    } else {
      add_ub({{m.soc(k), 1.0}, {m.soc(k - 1), -1.0}, {m.cbar(), -b.rate_frac}}, "r_rup_" + tag);
      add_ub({{m.soc(k), -1.0}, {m.soc(k - 1), 1.0}, {m.cbar(), -b.rate_frac}}, "r_rdn_" + tag);
    }
  }

  if (spec.enforce_zeh) {
    std::vector<Entry> zeh;
    double demand = 0.0;
    for (std::size_t i = 0; i < hh.size(); ++i) {
      const std::size_t col = m.area(spec.mode == Mode::Individual ? 0 : i);
      zeh.push_back({col, -hh[i].total_yield()});
      demand += hh[i].total_consumption();
    }
    lp.a_ub.append_row(std::move(zeh));
    lp.b_ub.push_back(-demand);
    lp.ub_names.push_back("r_zeh");
  }
  return out;
}

SizingSolution extract_solution(std::span<const double> raw, SolveStatus status, double reported_objective,
                                const VariableMap& m, const SizingProblemSpec& spec) {
  SizingSolution s;
  s.status = status;
  if (status != SolveStatus::Optimal) {
    s.objective = std::nan("");
    return s;
  }
  if (raw.size() != m.num_vars()) throw InternalError("raw solution length does not match the variable map");

  const auto& p = spec.prices;
  double cost = p.pi_b * raw[m.cbar()];
  for (std::size_t i = 0; i < m.num_areas; ++i) cost += p.pi_pv * raw[m.area(i)];
  for (std::size_t k = 1; k <= m.num_steps; ++k) cost += p.pi_r * raw[m.spill(k)] + p.pi_g * raw[m.deficit(k)];
  const double scale = std::max({1.0, std::abs(cost), std::abs(reported_objective)});
  if (std::abs(cost - reported_objective) > 1e-8 * scale) {
    std::ostringstream os;
    os.precision(17);
    os << "objective mismatch: recomputed " << cost << " vs reported " << reported_objective;
    throw InternalError(os.str());
  }

  const auto nonneg = [](double v) { return std::max(v, 0.0); };
  s.objective = reported_objective;
  s.capacity = nonneg(raw[m.cbar()]);
  for (std::size_t i = 0; i < m.num_areas; ++i) s.pv_area.push_back(std::clamp(raw[m.area(i)], 0.0, spec.a_max));
  auto& t = s.trajectory;
  t.soc.push_back(spec.battery.init_frac * s.capacity);
  for (std::size_t k = 1; k <= m.num_steps; ++k) {
    t.soc.push_back(raw[m.soc(k)]);
    t.spill.push_back(nonneg(raw[m.spill(k)]));
    t.deficit.push_back(nonneg(raw[m.deficit(k)]));
  }
  return s;
}

SizingSolution extract_solution(const lp::SolveOutcome& outcome, const VariableMap& map,
                                const SizingProblemSpec& spec) {
  return extract_solution(outcome.primal, outcome.status, outcome.objective, map, spec);
}

SizingSolution solve_sizing(const SizingProblemSpec& spec, const lp::SolverConfig& config) {
  const SizingLP built = build_lp(spec);
  return extract_solution(lp::solve(built.lp, config), built.map, spec);
}

std::vector<double> lp_point(std::span<const double> areas, double capacity, const Trajectory& t,
                             const VariableMap& m) {
  std::vector<double> z(m.num_vars(), 0.0);
  for (std::size_t i = 0; i < m.num_areas; ++i) z[m.area(i)] = areas[i];
  z[m.cbar()] = capacity;
  for (std::size_t k = 1; k <= m.num_steps; ++k) {
    z[m.soc(k)] = t.soc[k];
    z[m.spill(k)] = t.spill[k - 1];
    z[m.deficit(k)] = t.deficit[k - 1];
  }
  return z;
}

}  // namespace pvsizing
