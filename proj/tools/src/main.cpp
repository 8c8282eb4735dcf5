#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "twolaw/version.hpp"
#include "twolaw_cli/config.hpp"
#include "twolaw_cli/io.hpp"
#include "twolaw_cli/oracles.hpp"
#include "twolaw_cli/report.hpp"
#include "twolaw_cli/scenario.hpp"

namespace {

using namespace twolaw;
using namespace twolaw::cli;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;

struct CommonOpts {
  std::string out = "out";
  std::string format = "csv";
  int threads = 0;          // 0 = keep config value
  std::uint64_t seed = 0;   // used when seed_set
  bool seed_set = false;
};

void apply_overrides(ScenarioConfig& config, const CommonOpts& opts) {
  if (opts.seed_set) config.master_seed = opts.seed;
  if (opts.threads > 0) config.threads = opts.threads;
}

EnsembleSpec make_spec(const ScenarioConfig& config) {
  EnsembleSpec spec;
  spec.n_traj = config.n_traj;
  spec.master_seed = config.master_seed;
  spec.n_samples = config.n_samples;
  spec.threads = config.threads;
  return spec;
}

int cmd_simulate(const std::string& config_path, const CommonOpts& opts) {
  ScenarioConfig config = load_config(config_path);
  apply_overrides(config, opts);
  const BuiltScenario built = build_scenario(config);

  const EnsembleStats stats = run_ensemble(*built.scenario, make_spec(config));
  const RunReport report = make_report(config, built, stats);

  ensure_directory(opts.out);
  write_manifest(opts.out, config, built.dt, config.master_seed);
  write_stats_csv(opts.out, stats);
  write_events_csv(opts.out, stats, built.basis_labels);
  write_text_file(opts.out + "/report.json", report.json.dump(2) + "\n");
  if (report.density) write_density_csv(opts.out, *report.density);
  if (opts.format == "json")
    write_text_file(opts.out + "/stats.json", stats_json(stats).dump(2) + "\n");

  std::printf("wrote %s/{manifest.json, obs_*.csv, events.csv, report.json%s}\n",
              opts.out.c_str(), report.density ? ", density.csv" : "");
  std::printf("trajectories: %d, events: %lld, event rate: %s\n", stats.n_traj,
              static_cast<long long>(stats.total_events),
              g17(stats.event_rate()).c_str());
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_spec,
              const CommonOpts& opts) {
  const std::size_t eq = axis_spec.find('=');
  if (eq == std::string::npos) {
    std::fprintf(stderr, "--axis expects key=v1,v2,...\n");
    return kExitUsage;
  }
  const std::string axis = axis_spec.substr(0, eq);
  std::vector<double> values;
  {
    std::string rest = axis_spec.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const std::size_t comma = rest.find(',', pos);
      const std::string tok =
          rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                      : comma - pos);
      if (!tok.empty()) {
        try {
          values.push_back(std::stod(tok));
        } catch (const std::exception&) {
          std::fprintf(stderr, "--axis: bad value '%s'\n", tok.c_str());
          return kExitUsage;
        }
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (values.empty()) {
    std::fprintf(stderr, "--axis: no values\n");
    return kExitUsage;
  }

  ScenarioConfig config = load_config(config_path);
  apply_overrides(config, opts);

  // Validate each grid point up front so failures arrive before any run.
  std::vector<std::string> final_obs = resolved_observables(config);
  for (double v : values) {
    ScenarioConfig point = config;
    set_config_field(point, axis, v);
    (void)parse_config(serialize_config(point));
  }

  auto factory = [&](double v) {
    ScenarioConfig point = config;
    set_config_field(point, axis, v);
    return std::move(build_scenario(point).scenario);
  };
  const std::vector<SweepRow> rows = sweep(factory, values, make_spec(config));

  ensure_directory(opts.out);
  write_manifest(opts.out, config, resolved_dt(config), config.master_seed);
  write_sweep_csv(opts.out, axis, rows, final_obs);
  std::printf("wrote %s/sweep.csv (%zu rows over %s)\n", opts.out.c_str(),
              rows.size(), axis.c_str());
  return kExitOk;
}

int cmd_bounds(const std::string& records_path, const CommonOpts& opts) {
  const std::vector<ExperimentRecord> records =
      load_experiment_records(records_path);
  const std::vector<BoundRow> rows = bounds_report(records);
  const double tau0_ref = 1e-2;  // perception-time reference, seconds

  ensure_directory(opts.out);
  write_bounds_csv(opts.out + "/bounds.csv", rows, tau0_ref);
  if (opts.format == "json")
    write_text_file(opts.out + "/bounds.json",
                    bounds_json(rows, tau0_ref).dump(2) + "\n");

  for (const BoundRow& row : rows) {
    std::printf("%-12s m = %-12s lambda = %-12s T0 %s %s J", row.label.c_str(),
                g17(row.mass_kg).c_str(), g17(row.length_m).c_str(),
                row.direction == "upper" ? "<" : ">",
                g17(row.t0_bound).c_str());
    if (row.reference_t0 > 0.0) {
      std::printf("  [published: %s J%s]", g17(row.reference_t0).c_str(),
                  row.discrepant ? ", DISCREPANT" : "");
    }
    std::printf("\n");
  }
  std::printf(
      "reference tau0 <= %s s; fluctuation power T0/tau0 per row is in "
      "bounds.csv\n",
      g17(tau0_ref).c_str());
  return kExitOk;
}

int cmd_validate(const std::string& config_path) {
  const ScenarioConfig config = load_config(config_path);
  std::printf("OK: %s\n", config_path.c_str());
  std::printf("model = %s, dt = %s, t_end = %s, n_traj = %d\n",
              model_name(config.model), g17(resolved_dt(config)).c_str(),
              g17(config.t_end).c_str(), config.n_traj);
  return kExitOk;
}

int cmd_oracle(const std::string& name) {
  const std::vector<OracleResult> results = run_oracles(name);
  bool all_pass = true;
  for (const OracleResult& r : results) {
    std::printf("[%s] %-20s residual %-13s tol %-10s %s\n",
                r.pass ? "PASS" : "FAIL", r.name.c_str(),
                g17(r.residual).c_str(), g17(r.tolerance).c_str(),
                r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twolaw: unitary evolution + entropy-criterion collapse simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts opts;
  std::string config_path, axis_spec, records_path, oracle_name;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opts.out, "output directory");
    sub->add_option("--format", opts.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", opts.threads, "worker threads (0 = config)");
    sub->add_option("--seed", opts.seed, "master seed override")
        ->each([&](const std::string&) { opts.seed_set = true; });
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run one scenario");
  simulate->add_option("config", config_path, "scenario config file")
      ->required();
  add_common(simulate);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweep");
  sweep_cmd->add_option("config", config_path, "scenario config file")
      ->required();
  sweep_cmd->add_option("--axis", axis_spec, "key=v1,v2,... (e.g. collapse.t0)")
      ->required();
  add_common(sweep_cmd);

  CLI::App* bounds_cmd =
      app.add_subcommand("bounds", "experimental T0 bound table");
  bounds_cmd->add_option("records", records_path, "experiment records file")
      ->required();
  add_common(bounds_cmd);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "parse and validate a config");
  validate_cmd->add_option("config", config_path, "scenario config file")
      ->required();

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "run a named analytic-oracle comparison");
  std::string names;
  for (const std::string& n : twolaw::cli::oracle_names())
    names += (names.empty() ? "" : "|") + n;
  oracle_cmd->add_option("name", oracle_name, "oracle name, 'all', one of: " + names)
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, opts);
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, axis_spec, opts);
    if (bounds_cmd->parsed()) return cmd_bounds(records_path, opts);
    if (validate_cmd->parsed()) return cmd_validate(config_path);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_name);
  } catch (const twolaw::cli::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
