#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pvsizing/model.hpp"

namespace pvsizing {

enum class DataSource { CsvFile, Synthetic };

const char* to_string(DataSource source);

struct DatasetManifest {
  DataSource source = DataSource::Synthetic;
  std::size_t households = 0;
  std::size_t num_steps = 0;
  double step_hours = 0.5;
  std::optional<std::uint64_t> seed;
  // ISO-8601 timestamp of the first step (UTC).
  std::string start_time = "2021-04-01T00:00:00Z";
};

struct Dataset {
  std::vector<HouseholdSeries> households;
  DatasetManifest manifest;
};

// Long-format CSV with header
//   timestamp,household_id,consumption_kwh,pv_yield_kwh_per_m2
// Households appear in first-seen order; rows are sorted by timestamp within
// each household. Errors carry the 1-based line number of the offending row.
Dataset load_csv(const std::filesystem::path& path);

// Writes the same format, values printed with 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<HouseholdSeries>& households,
               const DatasetManifest& manifest);

// Seeded synthetic neighbourhood: half-sinusoid PV between 06:00 and 18:00
// scaled by a daily weather factor and a per-household orientation factor in
// [0.2, 1.0]; consumption with morning and evening peaks plus noise.
std::vector<HouseholdSeries> generate_synthetic(std::uint64_t seed, std::size_t n_households, std::size_t days,
                                                double step_hours);

Dataset synthetic_dataset(std::uint64_t seed, std::size_t n_households, std::size_t days, double step_hours);

// Seconds since the Unix epoch for "YYYY-MM-DDTHH:MM[:SS][Z|+HH:MM|-HH:MM]"
// (a space may replace the 'T'). Returns nullopt on malformed input.
std::optional<std::int64_t> parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t epoch_seconds);

}  // namespace pvsizing
