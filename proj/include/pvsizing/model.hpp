#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvsizing {

// Error hierarchy. Everything thrown by the library derives from Error so the
// CLI can map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row = 0) : Error(what), row_(row) {}
  // 1-based line number in the source file, 0 when not row specific.
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

struct TimeGrid {
  double step_hours = 0.5;
  std::size_t num_steps = 1;

  void validate() const;
};

// Aligned per-household series, one entry per time step.
//   consumption: kWh per step (X_k)
//   pv_yield:    kWh per m^2 of panel per step (Y_k)
struct HouseholdSeries {
  std::string household_id;
  std::vector<double> consumption;
  std::vector<double> pv_yield;

  std::size_t size() const { return consumption.size(); }
  void validate(std::size_t expected_steps) const;
  double total_consumption() const;
  double total_yield() const;
};

// Saturated battery model constants. SoC is confined to
// [alpha_lo * C, alpha_hi * C], moves at most rate_frac * C per step, decays by
// `retention` per step and starts at init_frac * C.
struct BatteryParams {
  double alpha_hi = 0.95;
  double alpha_lo = 0.05;
  double retention = 0.999;
  double rate_frac = 0.5;
  double init_frac = 0.05;

  void validate() const;
};

struct PriceSchedule {
  double pi_pv = 1000.0;  // per m^2 of panel
  double pi_b = 4500.0;   // per kWh of capacity
  double pi_r = 10.0;     // per kWh exported, negative for a feed-in tariff
  double pi_g = 30.0;     // per kWh produced by the fuel cell
};

struct PriceCheck {
  bool accepted = true;
  std::string diagnostic;

  explicit operator bool() const { return accepted; }
};

enum class Mode { Individual, Community };

struct SizingProblemSpec {
  Mode mode = Mode::Individual;
  std::vector<HouseholdSeries> households;
  BatteryParams battery;
  PriceSchedule prices;
  double a_max = 100.0;
  bool enforce_zeh = false;
  TimeGrid grid;

  std::size_t num_households() const { return households.size(); }
  std::size_t num_steps() const { return grid.num_steps; }
  // Number of PV-area decision variables: 1 for Individual, N for Community.
  std::size_t num_areas() const { return mode == Mode::Individual ? 1 : households.size(); }

  // Pooled net series used by the community ("big user") formulation.
  std::vector<double> pooled_consumption() const;

  void validate() const;
};

struct Trajectory {
  std::vector<double> soc;      // C_0 .. C_K
  std::vector<double> spill;    // phi+_1 .. phi+_K
  std::vector<double> deficit;  // phi-_1 .. phi-_K
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(SolveStatus status);
const char* to_string(Mode mode);

struct SizingSolution {
  std::vector<double> pv_area;
  double capacity = 0.0;
  Trajectory trajectory;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Infeasible;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

// Convexity requirement of the piecewise-linear exchange cost:
// pi_g >= 0 and pi_r >= -pi_g. Investment prices must be nonnegative.
PriceCheck validate_prices(const PriceSchedule& prices);

// Investment prices are quoted for `reference_days` of operation; this scales
// Pi_PV and Pi_B to a horizon of `horizon_days`. Exchange prices are per kWh
// and stay unchanged.
PriceSchedule amortize(const PriceSchedule& prices, double horizon_days, double reference_days = 334.0);

// Throws ConfigError("nonconvex cost configuration: ...") when rejected.
void require_valid_prices(const PriceSchedule& prices);

// Cost of meeting every kWh of demand from the fuel cell (no PV, no battery).
double baseline_cost(const std::vector<HouseholdSeries>& series, const PriceSchedule& prices);

// 100 * (baseline - optimal) / baseline. Negative values are allowed.
double savings_percent(double baseline, double optimal);

// Long-horizon generation-vs-demand balance of the installed panel area.
bool check_zeh(const SizingSolution& solution, const SizingProblemSpec& spec, double tol);

}  // namespace pvsizing
