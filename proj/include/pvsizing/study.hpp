#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pvsizing/data_io.hpp"
#include "pvsizing/model.hpp"
#include "pvsizing/report.hpp"
#include "pvsizing/simplex.hpp"

namespace pvsizing {

enum class ModeSelection { Individual, Community, All };
enum class ZehSelection { Off, On, Both };

struct ScenarioConfig {
  // Dataset: a CSV file, or a synthetic neighbourhood when data_path is empty.
  std::filesystem::path data_path;
  std::uint64_t seed = 1;
  std::size_t households = 20;
  std::size_t days = 31;
  double step_hours = 0.5;

  BatteryParams battery;
  // Investment prices are quoted for price_reference_days of operation and are
  // rescaled to the dataset horizon unless amortize is false.
  PriceSchedule prices;
  double price_reference_days = 334.0;
  bool amortize = true;
  double a_max = 100.0;

  ModeSelection modes = ModeSelection::All;
  ZehSelection zeh = ZehSelection::Both;
  std::filesystem::path out_dir = "out";
  lp::SolverConfig solver;
  std::size_t threads = 0;  // 0: hardware concurrency

  // Phi time series window, in days from the start of the horizon (0 = all).
  double phi_window_start_day = 0.0;
  double phi_window_days = 0.0;

  // Verification settings.
  bool oracle = true;
  std::size_t grid_points = 81;
  std::size_t max_oracle_steps = 2000;

  void validate() const;
};

// Flat "key = value" file; '#' starts a comment. Unknown keys are errors.
ScenarioConfig load_config(const std::filesystem::path& path);
void apply_setting(ScenarioConfig& config, const std::string& key, const std::string& value);
std::vector<std::string> config_keys();

// Loads or generates the dataset described by the config.
Dataset load_dataset(const ScenarioConfig& config);

// Prices used for solves on a horizon of `num_steps` steps.
PriceSchedule effective_prices(const ScenarioConfig& config, std::size_t num_steps, double step_hours);

// Problem for one household (Individual) or the whole dataset (Community),
// with effective prices and the config's battery and a_max.
SizingProblemSpec sizing_spec(const ScenarioConfig& config, const Dataset& data, Mode mode, bool enforce_zeh,
                              std::size_t household = 0);

struct PhiSummary {
  double plus_avg = 0.0;   // per user per step
  double minus_avg = 0.0;  // per user per step
  std::vector<double> plus_total;   // per step, summed over trajectories
  std::vector<double> minus_total;
};

// Averages phi over `users` users and all steps of the given trajectories
// (one pooled trajectory stands for every user of a community).
PhiSummary run_phi_stats(std::span<const Trajectory> trajectories, std::size_t users);

// Solves the selected cells. Individual cells solve one LP per household
// concurrently; Sharing cells solve one pooled LP. Per-household failures are
// recorded, never propagated.
StudyResults run_study(const ScenarioConfig& config, const Dataset& data);
StudyResults run_study(const ScenarioConfig& config);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

// Oracle bound and greedy equality per household, perturbation witnesses,
// superposition and ZEH monotonicity. Refuses oracle legs beyond
// max_oracle_steps.
VerifyReport run_verify(const ScenarioConfig& config, const Dataset& data);
VerifyReport run_verify(const ScenarioConfig& config);

}  // namespace pvsizing
