#include "pvsizing/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace pvsizing {

namespace {

bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void TimeGrid::validate() const {
  if (!(step_hours > 0.0) || !std::isfinite(step_hours)) {
    throw ConfigError("time grid: step_hours must be positive");
  }
  if (num_steps < 1) throw ConfigError("time grid: num_steps must be at least 1");
}

void HouseholdSeries::validate(std::size_t expected_steps) const {
  if (consumption.size() != expected_steps || pv_yield.size() != expected_steps) {
    std::ostringstream os;
    os << "household '" << household_id << "': expected " << expected_steps
       << " steps, got consumption=" << consumption.size() << " pv_yield=" << pv_yield.size();
    throw DataError(os.str());
  }
  for (std::size_t k = 0; k < expected_steps; ++k) {
    if (!finite_nonnegative(consumption[k]) || !finite_nonnegative(pv_yield[k])) {
      std::ostringstream os;
      os << "household '" << household_id << "': step " << k
         << " has a negative or non-finite value";
      throw DataError(os.str());
    }
  }
}

double HouseholdSeries::total_consumption() const {
  return std::accumulate(consumption.begin(), consumption.end(), 0.0);
}

double HouseholdSeries::total_yield() const {
  return std::accumulate(pv_yield.begin(), pv_yield.end(), 0.0);
}

void BatteryParams::validate() const {
  if (!(alpha_hi > 0.5 && alpha_hi <= 1.0)) throw ConfigError("battery: alpha_hi must lie in (0.5, 1]");
  if (!(alpha_lo >= 0.0 && alpha_lo < 0.5)) throw ConfigError("battery: alpha_lo must lie in [0, 0.5)");
  if (!(retention > 0.0 && retention <= 1.0)) throw ConfigError("battery: retention must lie in (0, 1]");
  if (!(rate_frac > 0.0 && rate_frac <= 1.0)) throw ConfigError("battery: rate_frac must lie in (0, 1]");
  if (!(init_frac >= alpha_lo && init_frac <= alpha_hi)) {
    throw ConfigError("battery: init_frac must lie in [alpha_lo, alpha_hi]");
  }
}

std::vector<double> SizingProblemSpec::pooled_consumption() const {
  std::vector<double> total(grid.num_steps, 0.0);
  for (const auto& h : households) {
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += h.consumption[k];
  }
  return total;
}

void SizingProblemSpec::validate() const {
  grid.validate();
  battery.validate();
  if (!(a_max > 0.0) || !std::isfinite(a_max)) throw ConfigError("a_max must be positive");
  if (households.empty()) throw ConfigError("at least one household is required");
  if (mode == Mode::Individual && households.size() != 1) {
    throw ConfigError("individual mode takes exactly one household");
  }
  for (const auto& h : households) h.validate(grid.num_steps);
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

const char* to_string(Mode mode) {
  return mode == Mode::Individual ? "Individual" : "Community";
}

PriceCheck validate_prices(const PriceSchedule& p) {
  const double all[] = {p.pi_pv, p.pi_b, p.pi_r, p.pi_g};
  for (double v : all) {
    if (!std::isfinite(v)) return {false, "prices must be finite"};
  }
  if (p.pi_g < 0.0) return {false, "nonconvex cost configuration: requires pi_g >= 0 (Pi_G >= 0)"};
  if (p.pi_r < -p.pi_g) {
    std::ostringstream os;
    os << "nonconvex cost configuration: requires pi_r >= -pi_g (Pi_R >= -Pi_G), got pi_r="
       << p.pi_r << " pi_g=" << p.pi_g;
    return {false, os.str()};
  }
  if (p.pi_pv < 0.0) return {false, "investment price pi_pv must be >= 0"};
  if (p.pi_b < 0.0) return {false, "investment price pi_b must be >= 0"};
  return {};
}

void require_valid_prices(const PriceSchedule& prices) {
  if (auto check = validate_prices(prices); !check) throw ConfigError(check.diagnostic);
}

double baseline_cost(const std::vector<HouseholdSeries>& series, const PriceSchedule& prices) {
  double demand = 0.0;
  for (const auto& h : series) demand += h.total_consumption();
  return prices.pi_g * demand;
}

double savings_percent(double baseline, double optimal) {
  if (!(baseline > 0.0)) throw ConfigError("savings undefined: baseline cost must be positive");
  return 100.0 * (baseline - optimal) / baseline;
}

bool check_zeh(const SizingSolution& solution, const SizingProblemSpec& spec, double tol) {
  if (!solution.optimal()) throw InvalidState("check_zeh requires an optimal solution");
  double generation = 0.0;
  double demand = 0.0;
  if (spec.mode == Mode::Individual) {
    const auto& h = spec.households.front();
    generation = solution.pv_area.at(0) * h.total_yield();
    demand = h.total_consumption();
  } else {
    for (std::size_t i = 0; i < spec.households.size(); ++i) {
      generation += solution.pv_area.at(i) * spec.households[i].total_yield();
      demand += spec.households[i].total_consumption();
    }
  }
  return generation >= demand - tol;
}

PriceSchedule amortize(const PriceSchedule& prices, double horizon_days, double reference_days) {
  if (!(horizon_days > 0.0) || !(reference_days > 0.0)) throw ConfigError("amortization horizons must be positive");
  PriceSchedule out = prices;
  out.pi_pv *= horizon_days / reference_days;
  out.pi_b *= horizon_days / reference_days;
  return out;
}

}  // namespace pvsizing
