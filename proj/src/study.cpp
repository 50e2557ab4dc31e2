#include "pvsizing/study.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "pvsizing/battery_sim.hpp"
#include "pvsizing/lp_model.hpp"
#include "pvsizing/oracle.hpp"

namespace pvsizing {

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return out;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || v[0] == '-') {
    throw ConfigError("'" + key + "' expects a nonnegative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto s = lower(v);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'");
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"data", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.data_path = v; }},
      {"seed", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.seed = to_count(k, v); }},
      {"households",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.households = to_count(k, v); }},
      {"days", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.days = to_count(k, v); }},
      {"step_hours",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.step_hours = to_double(k, v); }},
      {"alpha_hi",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.battery.alpha_hi = to_double(k, v); }},
      {"alpha_lo",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.battery.alpha_lo = to_double(k, v); }},
      {"gamma",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.battery.retention = to_double(k, v); }},
      {"rate",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.battery.rate_frac = to_double(k, v); }},
      {"beta",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.battery.init_frac = to_double(k, v); }},
      {"pi_pv", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.prices.pi_pv = to_double(k, v); }},
      {"pi_b", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.prices.pi_b = to_double(k, v); }},
      {"pi_r", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.prices.pi_r = to_double(k, v); }},
      {"pi_g", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.prices.pi_g = to_double(k, v); }},
      {"price_reference_days",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.price_reference_days = to_double(k, v); }},
      {"amortize", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.amortize = to_bool(k, v); }},
      {"a_max", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.a_max = to_double(k, v); }},
      {"mode",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         const auto s = lower(v);
         if (s == "individual") {
           c.modes = ModeSelection::Individual;
         } else if (s == "community" || s == "sharing") {
           c.modes = ModeSelection::Community;
         } else if (s == "all") {
           c.modes = ModeSelection::All;
         } else {
           throw ConfigError("'" + k + "' expects individual|community|all, got '" + v + "'");
         }
       }},
      {"zeh",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         const auto s = lower(v);
         if (s == "both") {
           c.zeh = ZehSelection::Both;
         } else {
           c.zeh = to_bool(k, v) ? ZehSelection::On : ZehSelection::Off;
         }
       }},
      {"out", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
      {"feasibility_tol",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.feasibility_tol = to_double(k, v); }},
      {"optimality_tol",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.optimality_tol = to_double(k, v); }},
      {"max_iterations",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.max_iterations = to_count(k, v); }},
      {"refactor_interval",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.solver.refactor_interval = to_count(k, v);
       }},
      {"pivot_rule",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         const auto s = lower(v);
         if (s == "bland") {
           c.solver.pivot_rule = lp::PivotRule::Bland;
         } else if (s == "dantzig") {
           c.solver.pivot_rule = lp::PivotRule::DantzigWithBlandFallback;
         } else {
           throw ConfigError("'" + k + "' expects bland|dantzig, got '" + v + "'");
         }
       }},
      {"threads", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.threads = to_count(k, v); }},
      {"phi_window_start_day",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.phi_window_start_day = to_double(k, v); }},
      {"phi_window_days",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.phi_window_days = to_double(k, v); }},
      {"oracle", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.oracle = to_bool(k, v); }},
      {"grid_points",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.grid_points = to_count(k, v); }},
      {"max_oracle_steps",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.max_oracle_steps = to_count(k, v); }},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t thread_count(const ScenarioConfig& c) {
  if (c.threads > 0) return c.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      (void)t;
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

SizingProblemSpec base_spec(const ScenarioConfig& c, const Dataset& d) {
  SizingProblemSpec spec;
  spec.battery = c.battery;
  spec.a_max = c.a_max;
  spec.grid.step_hours = d.manifest.step_hours;
  spec.grid.num_steps = d.manifest.num_steps;
  spec.prices = effective_prices(c, d.manifest.num_steps, d.manifest.step_hours);
  return spec;
}

SizingProblemSpec individual_spec(const SizingProblemSpec& base, const HouseholdSeries& h, bool zeh) {
  SizingProblemSpec spec = base;
  spec.mode = Mode::Individual;
  spec.households = {h};
  spec.enforce_zeh = zeh;
  return spec;
}

SizingProblemSpec community_spec(const SizingProblemSpec& base, const Dataset& d, bool zeh) {
  SizingProblemSpec spec = base;
  spec.mode = Mode::Community;
  spec.households = d.households;
  spec.enforce_zeh = zeh;
  return spec;
}

double safe_savings(double baseline, double cost) {
  return baseline > 0.0 ? savings_percent(baseline, cost) : std::nan("");
}

double zeh_tol(const SizingProblemSpec& spec) {
  double demand = 0.0;
  for (const auto& h : spec.households) demand += h.total_consumption();
  return 1e-9 * std::max(demand, 1.0);
}

void fill_phi(CellResult& cell, std::span<const Trajectory> trajectories, std::size_t users) {
  if (trajectories.empty() || users == 0) {
    cell.phi_plus_avg = cell.phi_minus_avg = std::nan("");
    return;
  }
  auto phi = run_phi_stats(trajectories, users);
  cell.phi_plus_avg = phi.plus_avg;
  cell.phi_minus_avg = phi.minus_avg;
  cell.phi_plus_total = std::move(phi.plus_total);
  cell.phi_minus_total = std::move(phi.minus_total);
}

CellResult individual_cell(const ScenarioConfig& c, const Dataset& d, const SizingProblemSpec& base, bool zeh) {
  CellResult cell;
  cell.cell = zeh ? "Ind. ZEH" : "Ind.";
  cell.mode = Mode::Individual;
  cell.enforce_zeh = zeh;
  const std::size_t n = d.households.size();
  cell.households = n;
  cell.per_household.resize(n);
  std::vector<Trajectory> trajectories(n);

  parallel_for(n, thread_count(c), [&](std::size_t i) {
    const auto spec = individual_spec(base, d.households[i], zeh);
    auto& r = cell.per_household[i];
    r.household_id = d.households[i].household_id;
    r.baseline = baseline_cost(spec.households, spec.prices);
    r.savings_pct = std::nan("");
    try {
      auto sol = solve_sizing(spec, c.solver);
      r.status = sol.status;
      if (sol.optimal()) {
        r.pv_area = sol.pv_area[0];
        r.capacity = sol.capacity;
        r.cost = sol.objective;
        r.savings_pct = safe_savings(r.baseline, r.cost);
        r.zeh = check_zeh(sol, spec, zeh_tol(spec));
        trajectories[i] = std::move(sol.trajectory);
      }
    } catch (const Error& e) {
      r.error = e.what();
    }
  });

  double pv = 0.0;
  double battery = 0.0;
  double savings_sum = 0.0;
  std::size_t savings_n = 0;
  std::size_t zeh_n = 0;
  std::vector<Trajectory> solved;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = cell.per_household[i];
    if (!r.error.empty()) {
      ++cell.failed;
      continue;
    }
    if (r.status == SolveStatus::Infeasible) ++cell.infeasible;
    if (r.status != SolveStatus::Optimal) {
      if (r.status != SolveStatus::Infeasible) ++cell.failed;
      continue;
    }
    ++cell.solved;
    pv += r.pv_area;
    battery += r.capacity;
    cell.total_cost += r.cost;
    cell.total_baseline += r.baseline;
    if (std::isnan(r.savings_pct)) {
      ++cell.undefined_baseline;
    } else {
      savings_sum += r.savings_pct;
      ++savings_n;
    }
    if (r.zeh) ++zeh_n;
    solved.push_back(std::move(trajectories[i]));
  }
  cell.status = cell.solved > 0 ? SolveStatus::Optimal : SolveStatus::Infeasible;
  const double solved_n = static_cast<double>(cell.solved);
  cell.av_pv = cell.solved ? pv / solved_n : std::nan("");
  cell.av_battery = cell.solved ? battery / solved_n : std::nan("");
  cell.zeh_pct = n ? 100.0 * static_cast<double>(zeh_n) / static_cast<double>(n) : std::nan("");
  cell.savings_mean_of_users_pct = savings_n ? savings_sum / static_cast<double>(savings_n) : std::nan("");
  cell.savings_aggregate_pct = safe_savings(cell.total_baseline, cell.total_cost);
  fill_phi(cell, solved, cell.solved);
  return cell;
}

CellResult sharing_cell(const ScenarioConfig& c, const Dataset& d, const SizingProblemSpec& base, bool zeh) {
  CellResult cell;
  cell.cell = zeh ? "Sharing ZEH" : "Sharing";
  cell.mode = Mode::Community;
  cell.enforce_zeh = zeh;
  const std::size_t n = d.households.size();
  cell.households = n;
  const auto spec = community_spec(base, d, zeh);
  cell.total_baseline = baseline_cost(spec.households, spec.prices);

  SizingSolution sol;
  std::string error;
  try {
    sol = solve_sizing(spec, c.solver);
  } catch (const Error& e) {
    error = e.what();
  }
  cell.status = sol.status;
  const bool ok = error.empty() && sol.optimal();
  const bool pooled_zeh = ok && check_zeh(sol, spec, zeh_tol(spec));
  for (std::size_t i = 0; i < n; ++i) {
    HouseholdResult r;
    r.household_id = d.households[i].household_id;
    r.status = sol.status;
    r.baseline = baseline_cost({d.households[i]}, spec.prices);
    r.savings_pct = std::nan("");
    r.error = error;
    if (ok) {
      r.pv_area = sol.pv_area[i];
      r.capacity = sol.capacity / static_cast<double>(n);
      r.cost = std::nan("");
      r.zeh = pooled_zeh;
    }
    cell.per_household.push_back(std::move(r));
  }
  if (!error.empty()) {
    cell.failed = n;
  } else if (sol.status == SolveStatus::Infeasible) {
    cell.infeasible = n;
  } else if (!ok) {
    cell.failed = n;
  }
  if (!ok) {
    cell.av_pv = cell.av_battery = std::nan("");
    cell.savings_mean_of_users_pct = cell.savings_aggregate_pct = std::nan("");
    cell.total_cost = std::nan("");
    cell.zeh_pct = 0.0;
    fill_phi(cell, {}, 0);
    return cell;
  }
  cell.solved = n;
  double pv = 0.0;
  for (double a : sol.pv_area) pv += a;
  cell.av_pv = pv / static_cast<double>(n);
  cell.av_battery = sol.capacity / static_cast<double>(n);
  cell.zeh_pct = pooled_zeh ? 100.0 : 0.0;
  cell.total_cost = sol.objective;
  cell.savings_aggregate_pct = safe_savings(cell.total_baseline, cell.total_cost);
  cell.savings_mean_of_users_pct = cell.savings_aggregate_pct;
  if (std::isnan(cell.savings_aggregate_pct)) cell.undefined_baseline = n;
  const Trajectory pooled[1] = {std::move(sol.trajectory)};
  fill_phi(cell, pooled, n);
  return cell;
}

}  // namespace

void ScenarioConfig::validate() const {
  battery.validate();
  require_valid_prices(prices);
  if (!(a_max > 0.0) || !std::isfinite(a_max)) throw ConfigError("a_max must be positive");
  if (!(price_reference_days > 0.0)) throw ConfigError("price_reference_days must be positive");
  if (data_path.empty()) {
    if (households < 1) throw ConfigError("households must be at least 1");
    if (days < 1) throw ConfigError("days must be at least 1");
    if (!(step_hours > 0.0)) throw ConfigError("step_hours must be positive");
  } else if (!std::filesystem::exists(data_path)) {
    throw ConfigError("data file not found: " + data_path.string());
  }
  if (grid_points < 2) throw ConfigError("grid_points must be at least 2");
  if (phi_window_start_day < 0.0 || phi_window_days < 0.0) throw ConfigError("phi window must be nonnegative");
  solver.validate();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : setters()) keys.push_back(k);
  return keys;
}

void apply_setting(ScenarioConfig& config, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second(config, key, value);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  ScenarioConfig c;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(n) + ": expected 'key = value'");
    }
    try {
      apply_setting(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  // Relative data paths resolve against the config file's directory.
  if (!c.data_path.empty() && c.data_path.is_relative()) c.data_path = path.parent_path() / c.data_path;
  return c;
}

Dataset load_dataset(const ScenarioConfig& c) {
  if (!c.data_path.empty()) return load_csv(c.data_path);
  return synthetic_dataset(c.seed, c.households, c.days, c.step_hours);
}

PriceSchedule effective_prices(const ScenarioConfig& c, std::size_t num_steps, double step_hours) {
  if (!c.amortize) return c.prices;
  return amortize(c.prices, static_cast<double>(num_steps) * step_hours / 24.0, c.price_reference_days);
}

SizingProblemSpec sizing_spec(const ScenarioConfig& c, const Dataset& d, Mode mode, bool zeh,
                              std::size_t household) {
  if (d.households.empty()) throw DataError("dataset has no households");
  const auto base = base_spec(c, d);
  if (mode == Mode::Community) return community_spec(base, d, zeh);
  if (household >= d.households.size()) throw ConfigError("household index out of range");
  return individual_spec(base, d.households[household], zeh);
}

PhiSummary run_phi_stats(std::span<const Trajectory> trajectories, std::size_t users) {
  PhiSummary s;
  if (trajectories.empty() || users == 0) return s;
  const std::size_t steps = trajectories.front().spill.size();
  s.plus_total.assign(steps, 0.0);
  s.minus_total.assign(steps, 0.0);
  for (const auto& t : trajectories) {
    if (t.spill.size() != steps || t.deficit.size() != steps) {
      throw InvalidState("run_phi_stats: trajectories of different lengths");
    }
    for (std::size_t k = 0; k < steps; ++k) {
      s.plus_total[k] += t.spill[k];
      s.minus_total[k] += t.deficit[k];
    }
  }
  double plus = 0.0;
  double minus = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    plus += s.plus_total[k];
    minus += s.minus_total[k];
  }
  const double denom = static_cast<double>(users) * static_cast<double>(std::max<std::size_t>(steps, 1));
  s.plus_avg = plus / denom;
  s.minus_avg = minus / denom;
  return s;
}

StudyResults run_study(const ScenarioConfig& c, const Dataset& d) {
  c.validate();
  if (d.households.empty()) throw DataError("dataset has no households");
  StudyResults out;
  out.manifest = d.manifest;
  out.battery = c.battery;
  out.a_max = c.a_max;
  const auto base = base_spec(c, d);
  out.prices = base.prices;

  const std::size_t steps = d.manifest.num_steps;
  const double per_day = 24.0 / d.manifest.step_hours;
  out.phi_window_begin = std::min(steps, static_cast<std::size_t>(std::llround(c.phi_window_start_day * per_day)));
  out.phi_window_end = c.phi_window_days > 0.0
                           ? std::min(steps, out.phi_window_begin +
                                                 static_cast<std::size_t>(std::llround(c.phi_window_days * per_day)))
                           : steps;

  const bool ind = c.modes != ModeSelection::Community;
  const bool com = c.modes != ModeSelection::Individual;
  const bool plain = c.zeh != ZehSelection::On;
  const bool zeh = c.zeh != ZehSelection::Off;
  if (ind && plain) out.cells.push_back(individual_cell(c, d, base, false));
  if (ind && zeh) out.cells.push_back(individual_cell(c, d, base, true));
  if (com && plain) out.cells.push_back(sharing_cell(c, d, base, false));
  if (com && zeh) out.cells.push_back(sharing_cell(c, d, base, true));
  return out;
}

StudyResults run_study(const ScenarioConfig& c) {
  c.validate();
  return run_study(c, load_dataset(c));
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& r) { return r.passed; });
}

VerifyReport run_verify(const ScenarioConfig& c, const Dataset& d) {
  c.validate();
  const std::size_t steps = d.manifest.num_steps;
  if (c.oracle && steps > c.max_oracle_steps) {
    throw ConfigError("horizon limit: the oracle legs need K <= " + std::to_string(c.max_oracle_steps) + ", got K = " +
                      std::to_string(steps) + " (disable the oracle or shorten the horizon)");
  }
  const auto base = base_spec(c, d);
  const std::size_t n = d.households.size();
  const std::size_t threads = thread_count(c);
  const double rel = 1e-8;

  struct PerHousehold {
    SizingSolution plain;
    SizingSolution zeh;
    std::optional<Theorem1Report> theorem1;
    std::optional<GreedyEqualityReport> greedy;
    std::string witness;  // empty: none found
    std::string error;
  };
  std::vector<PerHousehold> per(n);
  const bool greedy_applies = base.prices.pi_r > 0.0 && base.prices.pi_g > 0.0;
  parallel_for(n, threads, [&](std::size_t i) {
    auto& p = per[i];
    try {
      const auto spec = individual_spec(base, d.households[i], false);
      p.plain = solve_sizing(spec, c.solver);
      p.zeh = solve_sizing(individual_spec(base, d.households[i], true), c.solver);
      if (c.oracle) p.theorem1 = check_theorem1(spec, default_grid(spec, c.grid_points, c.grid_points), c.solver);
      if (greedy_applies) p.greedy = check_greedy_equality(spec, 1e-6, c.solver);
      if (p.plain.optimal()) {
        if (auto w = find_perturbation(p.plain, spec)) {
          std::ostringstream os;
          os << "j=" << w->j << " dV=" << w->cost_delta;
          p.witness = os.str();
        }
      }
    } catch (const Error& e) {
      p.error = e.what();
    }
  });

  VerifyReport report;
  const auto add = [&](std::string name, bool ok, std::string detail) {
    report.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  std::size_t errors = 0;
  std::string first_error;
  for (std::size_t i = 0; i < n; ++i) {
    if (!per[i].error.empty()) {
      if (errors++ == 0) first_error = d.households[i].household_id + ": " + per[i].error;
    }
  }
  add("execution", errors == 0, errors == 0 ? "all households evaluated" : first_error);

  if (c.oracle) {
    std::size_t ok = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& p : per) {
      if (p.theorem1 && p.theorem1->passed) ++ok;
      if (p.theorem1 && std::isfinite(p.theorem1->margin)) worst = std::min(worst, p.theorem1->margin);
    }
    std::ostringstream os;
    os << ok << "/" << n << " households, smallest margin " << worst;
    add("oracle_bound", ok == n, os.str());
  } else {
    add("oracle_bound", true, "skipped: oracle disabled");
  }

  if (greedy_applies) {
    std::size_t ok = 0;
    double worst = 0.0;
    for (const auto& p : per) {
      if (p.greedy && p.greedy->passed) ++ok;
      if (p.greedy) worst = std::max(worst, p.greedy->relative_gap);
    }
    std::ostringstream os;
    os << ok << "/" << n << " households, largest relative gap " << worst;
    add("greedy_equality", ok == n, os.str());
  } else {
    add("greedy_equality", true, "skipped: requires pi_r > 0 and pi_g > 0");
  }

  {
    std::size_t found = 0;
    for (const auto& p : per) found += p.witness.empty() ? 0 : 1;
    add("perturbation_witness", errors == 0,
        std::to_string(found) + "/" + std::to_string(n) + " solutions admit a verified witness");
  }

  {
    bool ok = true;
    std::string detail;
    double sum_plain = 0.0;
    bool all_plain = true;
    double sum_zeh = 0.0;
    bool all_zeh = true;
    for (const auto& p : per) {
      all_plain = all_plain && p.plain.optimal();
      all_zeh = all_zeh && p.zeh.optimal();
      if (p.plain.optimal()) sum_plain += p.plain.objective;
      if (p.zeh.optimal()) sum_zeh += p.zeh.objective;
    }
    try {
      const auto pooled = solve_sizing(community_spec(base, d, false), c.solver);
      const auto pooled_zeh = solve_sizing(community_spec(base, d, true), c.solver);
      std::ostringstream os;
      if (all_plain) {
        ok = ok && pooled.optimal() && pooled.objective <= sum_plain + rel * (1.0 + std::abs(sum_plain));
        os << "community " << pooled.objective << " vs individual sum " << sum_plain;
      }
      if (all_zeh) {
        ok = ok && pooled_zeh.optimal() && pooled_zeh.objective <= sum_zeh + rel * (1.0 + std::abs(sum_zeh));
        os << "; with ZEH " << pooled_zeh.objective << " vs " << sum_zeh;
      }
      detail = os.str();
      add("superposition", ok, detail);

      bool mono = true;
      std::size_t checked = 0;
      const auto check_pair = [&](const SizingSolution& a, const SizingSolution& b, const SizingProblemSpec& zspec) {
        if (!a.optimal() || !b.optimal()) return;
        ++checked;
        mono = mono && b.objective >= a.objective - rel * (1.0 + std::abs(a.objective));
        mono = mono && check_zeh(b, zspec, zeh_tol(zspec));
      };
      for (std::size_t i = 0; i < n; ++i) {
        check_pair(per[i].plain, per[i].zeh, individual_spec(base, d.households[i], true));
      }
      check_pair(pooled, pooled_zeh, community_spec(base, d, true));
      add("zeh_monotonicity", mono, std::to_string(checked) + " feasible pairs checked");
    } catch (const Error& e) {
      add("superposition", false, e.what());
      add("zeh_monotonicity", false, e.what());
    }
  }
  return report;
}

VerifyReport run_verify(const ScenarioConfig& c) {
  c.validate();
  return run_verify(c, load_dataset(c));
}

}  // namespace pvsizing
