#include "pvsizing/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace pvsizing {

using nlohmann::json;

namespace {

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool same(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same(a[i], b[i])) return false;
  }
  return true;
}

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

json num_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_from(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

std::vector<double> series_from(const json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(num_from(v));
  return out;
}

SolveStatus status_from(const std::string& s) {
  for (auto st : {SolveStatus::Optimal, SolveStatus::Infeasible, SolveStatus::Unbounded, SolveStatus::IterationLimit}) {
    if (s == to_string(st)) return st;
  }
  throw DataError("unknown solve status '" + s + "'");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

bool HouseholdResult::operator==(const HouseholdResult& o) const {
  return household_id == o.household_id && status == o.status && same(pv_area, o.pv_area) &&
         same(capacity, o.capacity) && same(cost, o.cost) && same(baseline, o.baseline) &&
         same(savings_pct, o.savings_pct) && zeh == o.zeh && error == o.error;
}

bool CellResult::operator==(const CellResult& o) const {
  return cell == o.cell && mode == o.mode && enforce_zeh == o.enforce_zeh && status == o.status &&
         households == o.households && solved == o.solved && infeasible == o.infeasible && failed == o.failed &&
         undefined_baseline == o.undefined_baseline && same(av_pv, o.av_pv) && same(av_battery, o.av_battery) &&
         same(zeh_pct, o.zeh_pct) && same(savings_mean_of_users_pct, o.savings_mean_of_users_pct) &&
         same(savings_aggregate_pct, o.savings_aggregate_pct) && same(total_cost, o.total_cost) &&
         same(total_baseline, o.total_baseline) && same(phi_plus_avg, o.phi_plus_avg) &&
         same(phi_minus_avg, o.phi_minus_avg) && per_household == o.per_household &&
         same(phi_plus_total, o.phi_plus_total) && same(phi_minus_total, o.phi_minus_total);
}

bool StudyResults::operator==(const StudyResults& o) const {
  const auto& m = manifest;
  const auto& n = o.manifest;
  return m.source == n.source && m.households == n.households && m.num_steps == n.num_steps &&
         same(m.step_hours, n.step_hours) && m.seed == n.seed && m.start_time == n.start_time &&
         same(prices.pi_pv, o.prices.pi_pv) && same(prices.pi_b, o.prices.pi_b) &&
         same(prices.pi_r, o.prices.pi_r) && same(prices.pi_g, o.prices.pi_g) &&
         same(battery.alpha_hi, o.battery.alpha_hi) && same(battery.alpha_lo, o.battery.alpha_lo) &&
         same(battery.retention, o.battery.retention) && same(battery.rate_frac, o.battery.rate_frac) &&
         same(battery.init_frac, o.battery.init_frac) && same(a_max, o.a_max) && cells == o.cells &&
         phi_window_begin == o.phi_window_begin && phi_window_end == o.phi_window_end;
}

std::string report_json(const StudyResults& r) {
  json j;
  j["manifest"] = {{"source", to_string(r.manifest.source)},
                   {"households", r.manifest.households},
                   {"num_steps", r.manifest.num_steps},
                   {"step_hours", r.manifest.step_hours},
                   {"seed", r.manifest.seed ? json(*r.manifest.seed) : json(nullptr)},
                   {"start_time", r.manifest.start_time}};
  j["prices"] = {{"pi_pv", r.prices.pi_pv}, {"pi_b", r.prices.pi_b}, {"pi_r", r.prices.pi_r}, {"pi_g", r.prices.pi_g}};
  j["battery"] = {{"alpha_hi", r.battery.alpha_hi},
                  {"alpha_lo", r.battery.alpha_lo},
                  {"retention", r.battery.retention},
                  {"rate_frac", r.battery.rate_frac},
                  {"init_frac", r.battery.init_frac}};
  j["a_max"] = r.a_max;
  j["phi_window"] = {{"begin", r.phi_window_begin}, {"end", r.phi_window_end}};
  json cells = json::array();
  for (const auto& c : r.cells) {
    json hh = json::array();
    for (const auto& h : c.per_household) {
      hh.push_back({{"household_id", h.household_id},
                    {"status", to_string(h.status)},
                    {"pv_area", num_json(h.pv_area)},
                    {"capacity", num_json(h.capacity)},
                    {"cost", num_json(h.cost)},
                    {"baseline", num_json(h.baseline)},
                    {"savings_pct", num_json(h.savings_pct)},
                    {"zeh", h.zeh},
                    {"error", h.error}});
    }
    json plus = json::array();
    json minus = json::array();
    for (double v : c.phi_plus_total) plus.push_back(num_json(v));
    for (double v : c.phi_minus_total) minus.push_back(num_json(v));
    cells.push_back({{"cell", c.cell},
                     {"mode", to_string(c.mode)},
                     {"enforce_zeh", c.enforce_zeh},
                     {"status", to_string(c.status)},
                     {"households", c.households},
                     {"solved", c.solved},
                     {"infeasible", c.infeasible},
                     {"failed", c.failed},
                     {"undefined_baseline", c.undefined_baseline},
                     {"av_pv", num_json(c.av_pv)},
                     {"av_battery", num_json(c.av_battery)},
                     {"zeh_pct", num_json(c.zeh_pct)},
                     {"savings_mean_of_users_pct", num_json(c.savings_mean_of_users_pct)},
                     {"savings_aggregate_pct", num_json(c.savings_aggregate_pct)},
                     {"total_cost", num_json(c.total_cost)},
                     {"total_baseline", num_json(c.total_baseline)},
                     {"phi_plus_avg", num_json(c.phi_plus_avg)},
                     {"phi_minus_avg", num_json(c.phi_minus_avg)},
                     {"per_household", std::move(hh)},
                     {"phi_plus_total", std::move(plus)},
                     {"phi_minus_total", std::move(minus)}});
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

StudyResults parse_report_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report JSON: ") + e.what());
  }
  try {
    StudyResults r;
    const auto& m = j.at("manifest");
    r.manifest.source = m.at("source").get<std::string>() == "CsvFile" ? DataSource::CsvFile : DataSource::Synthetic;
    r.manifest.households = m.at("households").get<std::size_t>();
    r.manifest.num_steps = m.at("num_steps").get<std::size_t>();
    r.manifest.step_hours = m.at("step_hours").get<double>();
    if (!m.at("seed").is_null()) r.manifest.seed = m.at("seed").get<std::uint64_t>();
    r.manifest.start_time = m.at("start_time").get<std::string>();
    const auto& p = j.at("prices");
    r.prices = {p.at("pi_pv").get<double>(), p.at("pi_b").get<double>(), p.at("pi_r").get<double>(),
                p.at("pi_g").get<double>()};
    const auto& b = j.at("battery");
    r.battery.alpha_hi = b.at("alpha_hi").get<double>();
    r.battery.alpha_lo = b.at("alpha_lo").get<double>();
    r.battery.retention = b.at("retention").get<double>();
    r.battery.rate_frac = b.at("rate_frac").get<double>();
    r.battery.init_frac = b.at("init_frac").get<double>();
    r.a_max = j.at("a_max").get<double>();
    r.phi_window_begin = j.at("phi_window").at("begin").get<std::size_t>();
    r.phi_window_end = j.at("phi_window").at("end").get<std::size_t>();
    for (const auto& c : j.at("cells")) {
      CellResult cr;
      cr.cell = c.at("cell").get<std::string>();
      cr.mode = c.at("mode").get<std::string>() == "Community" ? Mode::Community : Mode::Individual;
      cr.enforce_zeh = c.at("enforce_zeh").get<bool>();
      cr.status = status_from(c.at("status").get<std::string>());
      cr.households = c.at("households").get<std::size_t>();
      cr.solved = c.at("solved").get<std::size_t>();
      cr.infeasible = c.at("infeasible").get<std::size_t>();
      cr.failed = c.at("failed").get<std::size_t>();
      cr.undefined_baseline = c.at("undefined_baseline").get<std::size_t>();
      cr.av_pv = num_from(c.at("av_pv"));
      cr.av_battery = num_from(c.at("av_battery"));
      cr.zeh_pct = num_from(c.at("zeh_pct"));
      cr.savings_mean_of_users_pct = num_from(c.at("savings_mean_of_users_pct"));
      cr.savings_aggregate_pct = num_from(c.at("savings_aggregate_pct"));
      cr.total_cost = num_from(c.at("total_cost"));
      cr.total_baseline = num_from(c.at("total_baseline"));
      cr.phi_plus_avg = num_from(c.at("phi_plus_avg"));
      cr.phi_minus_avg = num_from(c.at("phi_minus_avg"));
      for (const auto& h : c.at("per_household")) {
        HouseholdResult hr;
        hr.household_id = h.at("household_id").get<std::string>();
        hr.status = status_from(h.at("status").get<std::string>());
        hr.pv_area = num_from(h.at("pv_area"));
        hr.capacity = num_from(h.at("capacity"));
        hr.cost = num_from(h.at("cost"));
        hr.baseline = num_from(h.at("baseline"));
        hr.savings_pct = num_from(h.at("savings_pct"));
        hr.zeh = h.at("zeh").get<bool>();
        hr.error = h.at("error").get<std::string>();
        cr.per_household.push_back(std::move(hr));
      }
      cr.phi_plus_total = series_from(c.at("phi_plus_total"));
      cr.phi_minus_total = series_from(c.at("phi_minus_total"));
      r.cells.push_back(std::move(cr));
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("report JSON does not match the schema: ") + e.what());
  }
}

void write_report(const StudyResults& r, const std::filesystem::path& dir) {
  if (r.cells.empty()) throw InvalidState("write_report: no results to write");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

  {
    const auto path = dir / "summary.csv";
    auto out = open_out(path);
    out << "cell,mode,enforce_zeh,status,households,solved,infeasible,failed,undefined_baseline,av_pv,av_battery,"
           "zeh_pct,savings_mean_of_users_pct,savings_aggregate_pct,total_cost,total_baseline\n";
    for (const auto& c : r.cells) {
      out << c.cell << ',' << to_string(c.mode) << ',' << (c.enforce_zeh ? 1 : 0) << ',' << to_string(c.status)
          << ',' << c.households << ',' << c.solved << ',' << c.infeasible << ',' << c.failed << ','
          << c.undefined_baseline << ',' << num(c.av_pv) << ',' << num(c.av_battery) << ',' << num(c.zeh_pct) << ','
          << num(c.savings_mean_of_users_pct) << ',' << num(c.savings_aggregate_pct) << ',' << num(c.total_cost)
          << ',' << num(c.total_baseline) << '\n';
    }
    close_out(out, path);
  }
  {
    const auto path = dir / "per_household.csv";
    auto out = open_out(path);
    out << "cell,household_id,status,pv_area,capacity,cost,baseline,savings_pct,zeh,error\n";
    for (const auto& c : r.cells) {
      for (const auto& h : c.per_household) {
        out << c.cell << ',' << h.household_id << ',' << to_string(h.status) << ',' << num(h.pv_area) << ','
            << num(h.capacity) << ',' << num(h.cost) << ',' << num(h.baseline) << ',' << num(h.savings_pct) << ','
            << (h.zeh ? 1 : 0) << ',' << csv_field(h.error) << '\n';
      }
    }
    close_out(out, path);
  }
  {
    const auto path = dir / "phi_stats.csv";
    auto out = open_out(path);
    out << "cell,pi_r,phi_plus_avg,phi_minus_avg\n";
    for (const auto& c : r.cells) {
      out << c.cell << ',' << num(r.prices.pi_r) << ',' << num(c.phi_plus_avg) << ',' << num(c.phi_minus_avg) << '\n';
    }
    close_out(out, path);
  }
  {
    const auto path = dir / "phi_series.csv";
    auto out = open_out(path);
    out << "cell,step,timestamp,phi_plus_total,phi_minus_total\n";
    const auto start = parse_timestamp(r.manifest.start_time).value_or(0);
    const auto step_seconds = static_cast<std::int64_t>(std::llround(r.manifest.step_hours * 3600.0));
    for (const auto& c : r.cells) {
      const std::size_t end = std::min(r.phi_window_end, c.phi_plus_total.size());
      for (std::size_t k = r.phi_window_begin; k < end; ++k) {
        out << c.cell << ',' << k + 1 << ',' << format_timestamp(start + static_cast<std::int64_t>(k) * step_seconds)
            << ',' << num(c.phi_plus_total[k]) << ',' << num(c.phi_minus_total[k]) << '\n';
      }
    }
    close_out(out, path);
  }
  {
    const auto path = dir / "report.json";
    auto out = open_out(path);
    out << report_json(r);
    close_out(out, path);
  }
}

}  // namespace pvsizing
