#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "pvsizing/data_io.hpp"
#include "pvsizing/lp_model.hpp"
#include "pvsizing/lp_text.hpp"
#include "pvsizing/oracle.hpp"
#include "pvsizing/study.hpp"

using namespace pvsizing;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerify = 3;

// Flag overrides, keyed by config key. Values are applied after the config
// file so that flags win.
struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option(flag, values[key], help);
  }

  ScenarioConfig resolve(const CLI::App& app) const {
    ScenarioConfig c = config_path.empty() ? ScenarioConfig{} : load_config(config_path);
    for (const auto& [key, value] : values) {
      const std::string flag = "--" + key_to_flag(key);
      if (app.count(flag) > 0) apply_setting(c, key, value);
    }
    c.validate();
    return c;
  }

  static std::string key_to_flag(std::string key) {
    for (auto& ch : key) {
      if (ch == '_') ch = '-';
    }
    return key;
  }
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "Key = value scenario file")->check(CLI::ExistingFile);
  auto* data = app->add_option("--data", o.values["data"], "Dataset CSV");
  for (const char* k : {"seed", "households", "days"}) {
    app->add_option("--" + std::string(k), o.values[k], std::string("Synthetic dataset ") + k)->excludes(data);
  }
  o.add(app, "--step-hours", "step_hours", "Synthetic step length in hours");
  o.add(app, "--pi-r", "pi_r", "Price per exported kWh (negative: feed-in tariff)");
  o.add(app, "--pi-pv", "pi_pv", "PV price per m^2");
  o.add(app, "--pi-b", "pi_b", "Battery price per kWh");
  o.add(app, "--pi-g", "pi_g", "Fuel-cell price per kWh");
  o.add(app, "--a-max", "a_max", "Largest PV area in m^2");
  o.add(app, "--beta", "beta", "Initial SoC as a fraction of capacity");
  o.add(app, "--rate", "rate", "Largest SoC change per step as a fraction of capacity");
  o.add(app, "--gamma", "gamma", "Per-step retention");
  o.add(app, "--mode", "mode", "individual|community|all");
  app->add_flag("--zeh{on}", o.values["zeh"], "ZEH cells: --zeh (only ZEH), --zeh=off, --zeh=both");
  o.add(app, "--out", "out", "Output directory");
  o.add(app, "--threads", "threads", "Worker threads (0: all cores)");
}

void print_value(double v) {
  if (std::isnan(v)) {
    std::printf("%12s", "-");
  } else {
    std::printf("%12.4f", v);
  }
}

int cmd_study(const CLI::App& app, const Overrides& o) {
  const auto c = o.resolve(app);
  const auto results = run_study(c);
  write_report(results, c.out_dir);
  std::printf("%-12s %12s %12s %12s %12s %12s %12s %12s\n", "cell", "av_pv_m2", "av_batt_kwh", "zeh_pct",
              "savings_usr", "savings_agg", "phi_plus", "phi_minus");
  for (const auto& cell : results.cells) {
    std::printf("%-12s ", cell.cell.c_str());
    for (double v : {cell.av_pv, cell.av_battery, cell.zeh_pct, cell.savings_mean_of_users_pct,
                     cell.savings_aggregate_pct, cell.phi_plus_avg, cell.phi_minus_avg}) {
      print_value(v);
      std::printf(" ");
    }
    std::printf("\n");
    if (cell.infeasible + cell.failed > 0) {
      std::printf("  %zu infeasible, %zu failed of %zu households\n", cell.infeasible, cell.failed, cell.households);
    }
  }
  std::printf("reports written to %s\n", c.out_dir.string().c_str());
  return kExitOk;
}

int cmd_verify(const CLI::App& app, const Overrides& o, bool no_oracle) {
  auto c = o.resolve(app);
  if (no_oracle) c.oracle = false;
  const auto report = run_verify(c);
  for (const auto& chk : report.checks) {
    std::printf("%-22s %s  %s\n", chk.name.c_str(), chk.passed ? "PASS" : "FAIL", chk.detail.c_str());
  }
  return report.passed() ? kExitOk : kExitVerify;
}

int cmd_bench(const CLI::App& app, const Overrides& o, const std::vector<std::size_t>& horizons,
              std::size_t grid_points) {
  const auto c = o.resolve(app);
  if (!c.amortize) throw ConfigError("bench amortizes prices per horizon; amortize = false is not supported");
  const auto data = load_dataset(c);
  ScenarioConfig raw = c;
  raw.amortize = false;
  const auto spec = sizing_spec(raw, data, Mode::Individual, false);
  const auto rows = timing_benchmark(spec, horizons, grid_points, grid_points, c.price_reference_days);
  std::filesystem::create_directories(c.out_dir);
  write_timing_csv(rows, c.out_dir / "timing.csv");
  std::printf("%8s %12s %12s %8s\n", "K", "lp_s", "oracle_s", "faster");
  for (const auto& r : rows) {
    std::printf("%8zu %12.4f %12.4f %8s\n", r.num_steps, r.lp_seconds, r.oracle_seconds,
                r.lp_seconds < r.oracle_seconds ? "lp" : "oracle");
  }
  return kExitOk;
}

int cmd_synth(const CLI::App& app, const Overrides& o) {
  auto c = o.resolve(app);
  c.data_path.clear();
  const auto data = load_dataset(c);
  std::filesystem::create_directories(c.out_dir);
  const auto path = c.out_dir / "dataset.csv";
  write_csv(path, data.households, data.manifest);
  std::printf("%zu households, %zu steps written to %s\n", data.households.size(), data.manifest.num_steps,
              path.string().c_str());
  return kExitOk;
}

int cmd_export(const CLI::App& app, const Overrides& o, std::size_t household) {
  const auto c = o.resolve(app);
  const auto data = load_dataset(c);
  const Mode mode = c.modes == ModeSelection::Community ? Mode::Community : Mode::Individual;
  const auto spec = sizing_spec(c, data, mode, c.zeh == ZehSelection::On, household);
  const auto model = build_lp(spec);
  std::filesystem::create_directories(c.out_dir);
  const auto path = c.out_dir / "model.lp";
  lp::export_lp_text(model.lp, model.map, path);
  std::printf("%zu variables, %zu rows written to %s\n", model.lp.num_vars(), model.lp.num_eq() + model.lp.num_ub(),
              path.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PV and battery sizing by linear programming"};
  app.require_subcommand(1);

  Overrides study_o;
  Overrides verify_o;
  Overrides bench_o;
  Overrides synth_o;
  Overrides export_o;
  bool no_oracle = false;
  std::vector<std::size_t> horizons{96, 192, 336, 480, 960, 1488};
  std::size_t grid_points = 81;
  std::size_t household = 0;

  auto* study = app.add_subcommand("study", "Run the four-cell study and write reports");
  add_common(study, study_o);
  auto* verify = app.add_subcommand("verify", "Run the property checks against the grid oracle");
  add_common(verify, verify_o);
  verify->add_flag("--no-oracle", no_oracle, "Skip the grid-oracle bound check");
  auto* bench = app.add_subcommand("bench", "Time LP solves against the grid oracle");
  add_common(bench, bench_o);
  bench->add_option("--horizons", horizons, "Ascending horizons K")->delimiter(',');
  bench->add_option("--grid-points", grid_points, "Oracle grid points per axis");
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset CSV");
  add_common(synth, synth_o);
  auto* exp = app.add_subcommand("export-lp", "Write the LP in text form");
  add_common(exp, export_o);
  exp->add_option("--household", household, "Household index for Individual mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (study->parsed()) return cmd_study(*study, study_o);
    if (verify->parsed()) return cmd_verify(*verify, verify_o, no_oracle);
    if (bench->parsed()) return cmd_bench(*bench, bench_o, horizons, grid_points);
    if (synth->parsed()) return cmd_synth(*synth, synth_o);
    if (exp->parsed()) return cmd_export(*exp, export_o, household);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
