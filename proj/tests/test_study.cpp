#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pvsizing/study.hpp"

using namespace pvsizing;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pvsizing_study_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ScenarioConfig small_config(double pi_r) {
  ScenarioConfig c;
  c.households = 4;
  c.days = 2;
  c.prices.pi_r = pi_r;
  c.threads = 2;
  return c;
}

const CellResult& cell(const StudyResults& r, const std::string& name) {
  for (const auto& c : r.cells) {
    if (c.cell == name) return c;
  }
  FAIL("missing cell " << name);
  return r.cells.front();
}

}  // namespace

TEST_CASE("config file parsing with comments, relative data paths and errors") {
  const auto dir = scratch("config");
  {
    std::ofstream out(dir / "a.cfg");
    out << "# scenario\n"
           "pi_r = -5   # feed-in\n"
           "households=7\n"
           "mode = community\n"
           "zeh = on\n"
           "data = series.csv\n"
           "pivot_rule = bland\n";
  }
  const auto c = load_config(dir / "a.cfg");
  CHECK(c.prices.pi_r == -5.0);
  CHECK(c.households == 7);
  CHECK(c.modes == ModeSelection::Community);
  CHECK(c.zeh == ZehSelection::On);
  CHECK(c.data_path == dir / "series.csv");
  CHECK(c.solver.pivot_rule == lp::PivotRule::Bland);

  {
    std::ofstream out(dir / "b.cfg");
    out << "pi_r = 1\nbogus = 3\n";
  }
  try {
    (void)load_config(dir / "b.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }

  ScenarioConfig s;
  CHECK_THROWS_AS(apply_setting(s, "households", "-3"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "gamma", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "mode", "both"), ConfigError);
  CHECK(config_keys().size() > 20);
}

TEST_CASE("a feed-in price below minus the fuel-cell price is rejected before any solve") {
  auto c = small_config(-31.0);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(run_study(c), ConfigError);
  CHECK_THROWS_AS(run_verify(c), ConfigError);
}

TEST_CASE("missing data file is a config error") {
  ScenarioConfig c;
  c.data_path = "/nonexistent/series.csv";
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("verify refuses long horizons when the oracle is enabled") {
  ScenarioConfig c;
  c.days = 209;  // K = 10,032
  c.households = 1;
  try {
    (void)run_verify(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("horizon limit") != std::string::npos);
  }
}

TEST_CASE("run_phi_stats averages per user and step") {
  Trajectory t;
  t.spill = {1, 0, 1, 0};
  t.deficit = {0, 0, 0, 0};
  const Trajectory one[1] = {t};
  auto s = run_phi_stats(one, 1);
  CHECK(s.plus_avg == 0.5);
  CHECK(s.minus_avg == 0.0);
  CHECK(s.plus_total == std::vector<double>{1, 0, 1, 0});

  Trajectory z;
  z.spill.assign(6, 0.0);
  z.deficit.assign(6, 0.0);
  const Trajectory zeros[2] = {z, z};
  s = run_phi_stats(zeros, 2);
  CHECK(s.plus_avg == 0.0);
  CHECK(s.minus_avg == 0.0);
}

TEST_CASE("single household with zero demand") {
  Dataset d;
  d.households = {{"idle", std::vector<double>(48, 0.0), std::vector<double>(48, 0.05)}};
  d.manifest.households = 1;
  d.manifest.num_steps = 48;
  auto c = small_config(10.0);
  const auto r = run_study(c, d);
  const auto& ind = cell(r, "Ind.");
  CHECK(ind.solved == 1);
  CHECK(ind.av_pv == 0.0);
  CHECK(ind.av_battery == 0.0);
  CHECK(ind.undefined_baseline == 1);
  CHECK(std::isnan(ind.savings_mean_of_users_pct));
  CHECK(std::isnan(ind.savings_aggregate_pct));
  CHECK(ind.zeh_pct == 100.0);
}

TEST_CASE("pooled ZEH infeasibility is isolated to its cell") {
  Dataset d;
  d.households = {{"a", std::vector<double>(48, 0.4), std::vector<double>(48, 0.0)},
                  {"b", std::vector<double>(48, 0.2), std::vector<double>(48, 0.0)}};
  d.manifest.households = 2;
  d.manifest.num_steps = 48;
  const auto r = run_study(small_config(0.0), d);
  REQUIRE(r.cells.size() == 4);
  const auto& sz = cell(r, "Sharing ZEH");
  CHECK(sz.status == SolveStatus::Infeasible);
  CHECK(sz.infeasible == 2);
  CHECK(sz.solved == 0);
  CHECK(sz.zeh_pct == 0.0);
  CHECK(std::isnan(sz.av_pv));
  const auto& iz = cell(r, "Ind. ZEH");
  CHECK(iz.infeasible == 2);
  CHECK(iz.solved == 0);
  CHECK(cell(r, "Sharing").status == SolveStatus::Optimal);
  CHECK(cell(r, "Ind.").solved == 2);

  const auto dir = scratch("isolation");
  write_report(r, dir);
  CHECK(std::filesystem::exists(dir / "summary.csv"));
}

TEST_CASE("four-cell study ordering and byte-identical reports") {
  auto c = small_config(10.0);
  const auto a = run_study(c);
  REQUIRE(a.cells.size() == 4);
  const auto& ind = cell(a, "Ind.");
  const auto& indz = cell(a, "Ind. ZEH");
  const auto& sh = cell(a, "Sharing");
  const auto& shz = cell(a, "Sharing ZEH");
  const double tol = 1e-8;
  REQUIRE(ind.solved == 4);
  if (indz.solved == 4) CHECK(ind.total_cost <= indz.total_cost + tol * (1 + std::abs(indz.total_cost)));
  CHECK(sh.total_cost <= shz.total_cost + tol * (1 + std::abs(shz.total_cost)));
  CHECK(sh.total_cost <= ind.total_cost + tol * (1 + std::abs(ind.total_cost)));
  CHECK(shz.zeh_pct == 100.0);
  CHECK(ind.per_household.size() == 4);
  CHECK(sh.savings_mean_of_users_pct == sh.savings_aggregate_pct);

  c.threads = 1;
  const auto b = run_study(c);
  CHECK(a == b);
  const auto d1 = scratch("det1");
  const auto d2 = scratch("det2");
  write_report(a, d1);
  write_report(b, d2);
  for (const char* f : {"summary.csv", "per_household.csv", "phi_stats.csv", "phi_series.csv", "report.json"}) {
    CAPTURE(f);
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
}

TEST_CASE("mode and zeh selection choose the cells") {
  auto c = small_config(0.0);
  c.modes = ModeSelection::Individual;
  c.zeh = ZehSelection::Off;
  auto r = run_study(c);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].cell == "Ind.");
  c.modes = ModeSelection::Community;
  c.zeh = ZehSelection::On;
  r = run_study(c);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].cell == "Sharing ZEH");
}

TEST_CASE("phi window selects whole days") {
  auto c = small_config(-5.0);
  c.phi_window_start_day = 1;
  c.phi_window_days = 1;
  const auto r = run_study(c);
  CHECK(r.phi_window_begin == 48);
  CHECK(r.phi_window_end == 96);
}

TEST_CASE("default-style verify passes on a small seeded neighbourhood") {
  auto c = small_config(10.0);
  c.grid_points = 41;
  const auto rep = run_verify(c);
  for (const auto& chk : rep.checks) {
    CAPTURE(chk.name);
    CAPTURE(chk.detail);
    CHECK(chk.passed);
  }
  CHECK(rep.checks.size() == 6);
  CHECK(rep.passed());
}
