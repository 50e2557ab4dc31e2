#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pvsizing/data_io.hpp"
#include "pvsizing/model.hpp"

namespace pvsizing {

struct HouseholdResult {
  std::string household_id;
  SolveStatus status = SolveStatus::Infeasible;
  double pv_area = 0.0;
  // Individual cells: own battery. Sharing cells: equal share of the pooled one.
  double capacity = 0.0;
  double cost = 0.0;
  double baseline = 0.0;
  double savings_pct = 0.0;  // NaN when undefined (zero baseline, or pooled cells)
  bool zeh = false;
  std::string error;  // set when the solve threw; status is then meaningless

  bool operator==(const HouseholdResult&) const;
};

struct CellResult {
  std::string cell;  // "Ind.", "Ind. ZEH", "Sharing", "Sharing ZEH"
  Mode mode = Mode::Individual;
  bool enforce_zeh = false;
  SolveStatus status = SolveStatus::Optimal;  // pooled status for Sharing cells
  std::size_t households = 0;
  std::size_t solved = 0;
  std::size_t infeasible = 0;
  std::size_t failed = 0;  // numerical or iteration-limit failures
  std::size_t undefined_baseline = 0;
  double av_pv = 0.0;
  double av_battery = 0.0;
  double zeh_pct = 0.0;
  double savings_mean_of_users_pct = 0.0;
  double savings_aggregate_pct = 0.0;
  double total_cost = 0.0;
  double total_baseline = 0.0;
  double phi_plus_avg = 0.0;   // per user per step
  double phi_minus_avg = 0.0;  // per user per step
  std::vector<HouseholdResult> per_household;
  // Per-step totals over users, length K (empty when no solution).
  std::vector<double> phi_plus_total;
  std::vector<double> phi_minus_total;

  bool operator==(const CellResult&) const;
};

struct StudyResults {
  DatasetManifest manifest;
  PriceSchedule prices;  // as used in the solves (after amortization)
  BatteryParams battery;
  double a_max = 0.0;
  std::vector<CellResult> cells;
  // Window of steps [phi_window_begin, phi_window_end) for the phi time series.
  std::size_t phi_window_begin = 0;
  std::size_t phi_window_end = 0;

  bool operator==(const StudyResults&) const;
};

// Writes summary.csv, per_household.csv, phi_stats.csv, phi_series.csv and
// report.json into out_dir (created if needed).
void write_report(const StudyResults& results, const std::filesystem::path& out_dir);

std::string report_json(const StudyResults& results);
StudyResults parse_report_json(const std::string& text);

}  // namespace pvsizing
