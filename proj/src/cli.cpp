#include "wcs/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wcs/config.hpp"
#include "wcs/sim.hpp"
#include "wcs/validate.hpp"

namespace wcs {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

/// Write-temp-then-rename so readers never observe a partial file.
void atomic_write(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open '" + tmp.string() +
                               "' for writing");
    }
    out << contents;
  }
  fs::rename(tmp, path);
}

struct CommonFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> scheduler;
  std::optional<int> devices;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> duration;
  std::string out_dir = "out";
};

/// File values first, then flag overrides; the result re-validates.
SimConfig resolve_config(const CommonFlags& flags) {
  SimConfig cfg = flags.config_path ? load_config_file(*flags.config_path)
                                    : SimConfig{};
  if (flags.scheduler) {
    try {
      cfg.policy = policy_from_string(*flags.scheduler);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--scheduler: ") + e.what());
    }
  }
  if (flags.devices) cfg.devices = *flags.devices;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.trials) cfg.trials = *flags.trials;
  if (flags.duration) cfg.duration_s = *flags.duration;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

json summary_to_json(const ExperimentSummary& s) {
  json doc;
  doc["schema_version"] = s.schema_version;
  doc["scheduler"] = to_string(s.policy);
  doc["devices"] = s.devices;
  doc["trials"] = s.trials;
  doc["seed"] = s.seed;
  doc["duration_s"] = s.duration_s;
  doc["fleet_mean_distance"] = {
      {"per_trial", s.fleet_mean_distance_per_trial},
      {"mean", s.mean_fleet_distance},
      {"std", s.std_fleet_distance}};
  doc["fleet_drop_rate"] = {{"per_trial", s.fleet_drop_rate_per_trial}};
  doc["fallen"] = {{"per_trial", s.fallen_per_trial}};
  return doc;
}

std::string csv_of(const MetricsLog& log) {
  std::ostringstream oss;
  log.write_csv(oss);
  return oss.str();
}

int cmd_run(const CommonFlags& flags, std::ostream& out) {
  const SimConfig cfg = resolve_config(flags);
  fs::create_directories(flags.out_dir);

  ExperimentSummary summary;
  summary.policy = cfg.policy;
  summary.devices = cfg.devices;
  summary.trials = cfg.trials;
  summary.seed = cfg.seed;
  summary.duration_s = cfg.duration_s;
  for (int t = 0; t < cfg.trials; ++t) {
    const MetricsLog log = run_trial(cfg, cfg.seed + t);
    const fs::path name = cfg.trials == 1
                              ? fs::path("metrics.csv")
                              : fs::path("metrics_trial" + std::to_string(t) +
                                         ".csv");
    atomic_write(fs::path(flags.out_dir) / name, csv_of(log));
    summary.fleet_mean_distance_per_trial.push_back(log.fleet_mean_distance);
    summary.fleet_drop_rate_per_trial.push_back(log.fleet_drop_rate);
    summary.fallen_per_trial.push_back(log.fallen_count);
  }
  const auto& xs = summary.fleet_mean_distance_per_trial;
  summary.mean_fleet_distance =
      std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) {
      ss += (x - summary.mean_fleet_distance) *
            (x - summary.mean_fleet_distance);
    }
    summary.std_fleet_distance = std::sqrt(ss / (xs.size() - 1));
  }

  atomic_write(fs::path(flags.out_dir) / "summary.json",
               summary_to_json(summary).dump(2) + "\n");
  atomic_write(fs::path(flags.out_dir) / "resolved_config.json",
               config_to_json(cfg).dump(2) + "\n");

  out << "wrote " << flags.out_dir << "/metrics*.csv, summary.json, "
      << "resolved_config.json (fleet mean distance "
      << summary.mean_fleet_distance << " m)\n";
  return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const std::vector<int>& devices_list,
              const std::vector<std::string>& schedulers,
              bool per_trial_metrics, std::ostream& out) {
  const SimConfig base = resolve_config(flags);
  if (devices_list.empty() || schedulers.empty()) {
    throw ConfigError("sweep: --devices-list and --schedulers must be "
                      "nonempty");
  }
  std::vector<Policy> policies;
  for (const std::string& name : schedulers) {
    policies.push_back(policy_from_string(name));
  }
  for (int m : devices_list) {
    if (m < 1) throw ConfigError("sweep: device counts must be >= 1");
  }

  fs::create_directories(flags.out_dir);
  std::ostringstream csv;
  csv << "scheduler,m,trial,fleet_mean_distance\n";
  char buf[160];
  for (Policy policy : policies) {
    for (int m : devices_list) {
      for (int t = 0; t < base.trials; ++t) {
        SimConfig cfg = base;
        cfg.policy = policy;
        cfg.devices = m;
        // common random numbers: the (m, trial) cell reuses seed + t
        // across schedulers
        const std::uint64_t trial_seed = cfg.seed + t;
        const MetricsLog log =
            run_trial(cfg, trial_seed, {}, per_trial_metrics);
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.17g\n",
                      to_string(policy).c_str(), m, t,
                      log.fleet_mean_distance);
        csv << buf;
        if (per_trial_metrics) {
          const std::string name = "metrics_" + to_string(policy) + "_m" +
                                   std::to_string(m) + "_trial" +
                                   std::to_string(t) + ".csv";
          atomic_write(fs::path(flags.out_dir) / name, csv_of(log));
        }
      }
    }
  }
  atomic_write(fs::path(flags.out_dir) / "sweep.csv", csv.str());
  atomic_write(fs::path(flags.out_dir) / "resolved_config.json",
               config_to_json(base).dump(2) + "\n");
  out << "wrote " << flags.out_dir << "/sweep.csv ("
      << policies.size() * devices_list.size() * base.trials << " rows)\n";
  return kExitOk;
}

int cmd_validate(const std::optional<std::string>& config_path,
                 std::ostream& out, std::ostream& err) {
  McsTable table = McsTable::default_table();
  SimConfig cfg;
  bool table_broken = false;
  std::string table_error;
  if (config_path) {
    try {
      cfg = load_config_file(*config_path);
      table = cfg.mcs_table;
    } catch (const McsTableError& e) {
      table_broken = true;
      table_error = e.what();
    }
  }

  const Eigen::MatrixXd Q = cfg.lqr_state_weights.asDiagonal();
  Eigen::MatrixXd R(1, 1);
  R << cfg.lqr_input_weight;
  const PlantModel model =
      pendulum_plant(cfg.pendulum, Q, R, cfg.process_noise_variance);

  std::vector<CheckResult> results;
  if (table_broken) {
    results.push_back({"mcs-monotonicity", false, table_error});
  } else {
    results.push_back(check_mcs_monotonicity(table));
  }
  results.push_back(check_assignment_optimality(
      [](const Eigen::MatrixXd& c) { return hungarian(c); }));
  results.push_back(check_greedy_bound(
      [](const Eigen::MatrixXd& c) { return greedy(c); }));
  results.push_back(check_control_weight_oracle(model));

  bool all_ok = true;
  for (const CheckResult& r : results) {
    out << std::left << std::setw(26) << r.name
        << (r.passed ? "PASS" : "FAIL") << "  " << r.detail << "\n";
    if (!r.passed) all_ok = false;
  }
  if (!all_ok) {
    err << "validation failed\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Closed-loop simulator of low-latency wireless control over "
               "a time-sliced 5G frame"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<int> devices_list;
  std::vector<std::string> schedulers;
  bool per_trial_metrics = false;
  std::optional<std::string> validate_config;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path,
                    "JSON config file (flags override file values)");
    cmd->add_option("--scheduler", flags.scheduler,
                    "control | per | round-robin");
    cmd->add_option("--devices", flags.devices, "number of plants");
    cmd->add_option("--seed", flags.seed, "base RNG seed");
    cmd->add_option("--trials", flags.trials, "independent trials");
    cmd->add_option("--duration", flags.duration, "simulated seconds");
    cmd->add_option("--out", flags.out_dir, "output directory");
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  add_common(run);

  CLI::App* sweep =
      app.add_subcommand("sweep", "cross device counts and schedulers");
  add_common(sweep);
  sweep->add_option("--devices-list", devices_list,
                    "comma-separated device counts")
      ->delimiter(',')
      ->required();
  sweep->add_option("--schedulers", schedulers,
                    "comma-separated scheduler names")
      ->delimiter(',')
      ->required();
  sweep->add_flag("--per-trial-metrics", per_trial_metrics,
                  "also write one metrics CSV per (scheduler, m, trial)");

  CLI::App* validate =
      app.add_subcommand("validate", "run the fast invariant checks");
  validate->add_option("--config", validate_config,
                       "JSON config file to check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(flags, out);
    if (sweep->parsed()) {
      return cmd_sweep(flags, devices_list, schedulers, per_trial_metrics,
                       out);
    }
    return cmd_validate(validate_config, out, err);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const McsTableError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleMcsError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace wcs
