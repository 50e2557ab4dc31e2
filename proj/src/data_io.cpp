#include "pvsizing/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

namespace pvsizing {

const char* to_string(DataSource source) {
  return source == DataSource::CsvFile ? "CsvFile" : "Synthetic";
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  auto [p, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct Row {
  std::int64_t time;
  double consumption;
  double yield;
  std::size_t line;
};

}  // namespace

std::optional<std::int64_t> parse_timestamp(const std::string& text) {
  const std::string s = trim(text);
  if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':') {
    return std::nullopt;
  }
  int y, mo, d, h, mi, sec = 0;
  if (!parse_int(std::string_view(s).substr(0, 4), y) || !parse_int(std::string_view(s).substr(5, 2), mo) ||
      !parse_int(std::string_view(s).substr(8, 2), d) || !parse_int(std::string_view(s).substr(11, 2), h) ||
      !parse_int(std::string_view(s).substr(14, 2), mi)) {
    return std::nullopt;
  }
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    if (s.size() < pos + 3 || !parse_int(std::string_view(s).substr(pos + 1, 2), sec)) return std::nullopt;
    pos += 3;
  }
  int offset_minutes = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      pos += 1;
    } else if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
      int oh, om;
      if (!parse_int(std::string_view(s).substr(pos + 1, 2), oh) ||
          !parse_int(std::string_view(s).substr(pos + 4, 2), om)) {
        return std::nullopt;
      }
      offset_minutes = (s[pos] == '+' ? 1 : -1) * (oh * 60 + om);
    } else {
      return std::nullopt;
    }
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return days * 86400 + h * 3600 + mi * 60 + sec - offset_minutes * 60;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
  using namespace std::chrono;
  const std::int64_t days = (epoch_seconds >= 0 ? epoch_seconds : epoch_seconds - 86399) / 86400;
  const std::int64_t rem = epoch_seconds - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
  return buf;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file " + path.string(), 1);
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = split(line);
  const char* required[] = {"timestamp", "household_id", "consumption_kwh", "pv_yield_kwh_per_m2"};
  std::size_t col[4];
  for (int c = 0; c < 4; ++c) {
    auto it = std::find(header.begin(), header.end(), required[c]);
    if (it == header.end()) throw DataError(std::string("missing column '") + required[c] + "'", 1);
    col[c] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Row>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                          " cells, found " + std::to_string(cells.size()),
                      line_no);
    }
    const auto t = parse_timestamp(cells[col[0]]);
    if (!t) throw DataError("row " + std::to_string(line_no) + ": malformed timestamp '" + cells[col[0]] + "'", line_no);
    const std::string& id = cells[col[1]];
    if (id.empty()) throw DataError("row " + std::to_string(line_no) + ": empty household_id", line_no);
    double values[2];
    for (int c = 0; c < 2; ++c) {
      const auto v = parse_number(cells[col[2 + c]]);
      if (!v) {
        throw DataError("row " + std::to_string(line_no) + ": non-numeric " + required[2 + c] + " '" +
                            cells[col[2 + c]] + "'",
                        line_no);
      }
      if (*v < 0.0) {
        throw DataError("row " + std::to_string(line_no) + ": negative " + std::string(required[2 + c]), line_no);
      }
      values[c] = *v;
    }
    auto [it, inserted] = rows.try_emplace(id);
    if (inserted) order.push_back(id);
    it->second.push_back({*t, values[0], values[1], line_no});
  }
  if (order.empty()) throw DataError("no data rows in " + path.string());

  std::vector<std::int64_t> grid;
  Dataset out;
  for (const auto& id : order) {
    auto& r = rows[id];
    std::stable_sort(r.begin(), r.end(), [](const Row& a, const Row& b) { return a.time < b.time; });
    for (std::size_t k = 1; k < r.size(); ++k) {
      if (r[k].time == r[k - 1].time) {
        throw DataError("row " + std::to_string(r[k].line) + ": duplicate timestamp for household " + id, r[k].line);
      }
    }
    if (grid.empty()) {
      for (const auto& row : r) grid.push_back(row.time);
    } else {
      const std::size_t n = std::min(grid.size(), r.size());
      for (std::size_t k = 0; k < n; ++k) {
        if (r[k].time != grid[k]) {
          throw DataError("row " + std::to_string(r[k].line) + ": household " + id +
                              " is not on the same timestamp grid as " + order.front(),
                          r[k].line);
        }
      }
      if (r.size() != grid.size()) {
        const std::size_t bad = r.size() < grid.size() ? r.back().line : r[grid.size()].line;
        throw DataError("row " + std::to_string(bad) + ": ragged grid, household " + id + " has " +
                            std::to_string(r.size()) + " steps, expected " + std::to_string(grid.size()),
                        bad);
      }
    }
    HouseholdSeries h;
    h.household_id = id;
    for (const auto& row : r) {
      h.consumption.push_back(row.consumption);
      h.pv_yield.push_back(row.yield);
    }
    out.households.push_back(std::move(h));
  }

  auto& m = out.manifest;
  m.source = DataSource::CsvFile;
  m.households = out.households.size();
  m.num_steps = grid.size();
  m.step_hours = grid.size() > 1 ? static_cast<double>(grid[1] - grid[0]) / 3600.0 : 0.5;
  m.start_time = format_timestamp(grid.front());
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<HouseholdSeries>& households,
               const DatasetManifest& manifest) {
  const auto start = parse_timestamp(manifest.start_time);
  if (!start) throw ConfigError("malformed start_time '" + manifest.start_time + "'");
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error("cannot write " + path.string());
  std::fputs("timestamp,household_id,consumption_kwh,pv_yield_kwh_per_m2\n", f);
  const auto step_seconds = static_cast<std::int64_t>(std::llround(manifest.step_hours * 3600.0));
  for (const auto& h : households) {
    for (std::size_t k = 0; k < h.size(); ++k) {
      const std::string ts = format_timestamp(*start + static_cast<std::int64_t>(k) * step_seconds);
      std::fprintf(f, "%s,%s,%.17g,%.17g\n", ts.c_str(), h.household_id.c_str(), h.consumption[k], h.pv_yield[k]);
    }
  }
  if (std::fclose(f) != 0) throw Error("cannot write " + path.string());
}

namespace {

// Portable variates: the standard distributions are implementation defined.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 rng_;
};

double bump(double hour, double centre, double width) {
  const double z = (hour - centre) / width;
  return std::exp(-0.5 * z * z);
}

}  // namespace

std::vector<HouseholdSeries> generate_synthetic(std::uint64_t seed, std::size_t n_households, std::size_t days,
                                                double step_hours) {
  if (n_households < 1 || days < 1) throw ConfigError("synthetic data needs at least one household and one day");
  if (!(step_hours > 0.0) || step_hours > 24.0) throw ConfigError("step_hours must lie in (0, 24]");
  const auto per_day = static_cast<std::size_t>(std::llround(24.0 / step_hours));
  if (std::abs(static_cast<double>(per_day) * step_hours - 24.0) > 1e-9) {
    throw ConfigError("step_hours must divide a day evenly");
  }
  const std::size_t steps = per_day * days;
  constexpr double kPeakYield = 0.15;  // kW per m^2 of panel at solar noon, clear sky
  constexpr double kSunrise = 6.0;
  constexpr double kSunset = 18.0;

  Stream stream(seed);
  std::vector<double> weather(days);
  for (auto& w : weather) w = stream.uniform(0.25, 1.0);

  std::vector<HouseholdSeries> out(n_households);
  const int width = n_households > 999 ? static_cast<int>(std::to_string(n_households).size()) : 3;
  for (std::size_t i = 0; i < n_households; ++i) {
    auto& h = out[i];
    char id[32];
    std::snprintf(id, sizeof id, "H%0*zu", width, i + 1);
    h.household_id = id;
    const double orientation = stream.uniform(0.2, 1.0);
    const double base = stream.uniform(0.2, 0.45);
    const double morning = stream.uniform(0.4, 1.0);
    const double evening = stream.uniform(0.6, 1.4);
    h.consumption.resize(steps);
    h.pv_yield.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      const double hour = (static_cast<double>(k % per_day) + 0.5) * step_hours;
      const double kw = base + morning * bump(hour, 7.0, 0.8) + evening * bump(hour, 19.5, 1.5);
      const double noise = 1.0 + 0.25 * stream.normal();
      h.consumption[k] = std::max(kw * noise, 0.0) * step_hours;
      double y = 0.0;
      if (hour > kSunrise && hour < kSunset) {
        y = kPeakYield * std::sin(std::numbers::pi * (hour - kSunrise) / (kSunset - kSunrise)) * step_hours *
            weather[k / per_day] * orientation;
      }
      h.pv_yield[k] = y;
    }
  }
  return out;
}

Dataset synthetic_dataset(std::uint64_t seed, std::size_t n_households, std::size_t days, double step_hours) {
  Dataset d;
  d.households = generate_synthetic(seed, n_households, days, step_hours);
  d.manifest.source = DataSource::Synthetic;
  d.manifest.households = n_households;
  d.manifest.num_steps = d.households.front().size();
  d.manifest.step_hours = step_hours;
  d.manifest.seed = seed;
  return d;
}

}  // namespace pvsizing
