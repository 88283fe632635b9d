// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "risisac/harness.hpp"

namespace risisac {

namespace {

struct ConfigArgs {
  std::string file;
  std::vector<std::string> sets;
};

void add_config_flags(CLI::App* app, ConfigArgs& a) {
  app->add_option("--config", a.file, "key = value config file");
  app->add_option("--set", a.sets, "override one key, key=value (repeatable)");
}

// File keys first, then --set overrides.
void apply_args(SceneConfig& cfg, const ConfigArgs& a) {
  if (!a.file.empty()) {
    std::ifstream in(a.file);
    if (!in) throw Error(Errc::ConfigError, "cannot open config '" + a.file + "'");
    apply_config(cfg, in);
  }
  for (const std::string& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(Errc::ConfigError, "--set expects key=value, got '" + kv + "'");
    apply_config_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
}

std::uint64_t env_seed(std::uint64_t fallback) {
  const char* s = std::getenv("RISISAC_SEED");
  if (!s || !*s) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end) throw Error(Errc::ConfigError, std::string("RISISAC_SEED is not an integer: '") + s + "'");
  return v;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"RIS-assisted ISAC simulator"};
  app.require_subcommand(1);

  ConfigArgs sim_cfg;
  std::uint64_t sim_seed = 1;
  double sim_power = 50;
  int sim_case = 1;
  CLI::App* sim = app.add_subcommand("simulate", "run one trial with a verbose trace");
  add_config_flags(sim, sim_cfg);
  CLI::Option* sim_seed_opt = sim->add_option("--seed", sim_seed, "scene seed");
  CLI::Option* sim_power_opt = sim->add_option("--power", sim_power, "transmit power, dBm");
  CLI::Option* sim_case_opt = sim->add_option("--case", sim_case, "case id 1..8");

  ConfigArgs exp_cfg;
  std::string exp_name, exp_out = "results.csv";
  std::uint64_t exp_seed = 1;
  int exp_trials = 50, threads = 0;
  std::vector<double> exp_powers;
  bool timing = false;
  CLI::App* exp = app.add_subcommand("experiment", "Monte Carlo experiment to CSV");
  exp->add_option("name", exp_name, "experiment name")->required();
  exp->add_option("--out", exp_out, "output CSV path");
  CLI::Option* exp_seed_opt = exp->add_option("--seed", exp_seed, "master seed (else RISISAC_SEED, else 1)");
  exp->add_option("--trials", exp_trials, "trials per power point");
  exp->add_option("--powers", exp_powers, "transmit powers, dBm")->delimiter(',');
  exp->add_option("--threads", threads, "worker threads (0: OpenMP default)");
  exp->add_flag("--timing", timing, "append a runtime_ms column");
  add_config_flags(exp, exp_cfg);

  std::string val_path;
  CLI::App* val = app.add_subcommand("validate-config", "check a config file");
  val->add_option("path", val_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc != 0) std::cerr << app.help();
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      SceneConfig cfg;
      cfg.seed = env_seed(cfg.seed);
      apply_args(cfg, sim_cfg);
      if (*sim_seed_opt) cfg.seed = sim_seed;
      if (*sim_power_opt) cfg.power_dbm = sim_power;
      if (*sim_case_opt) cfg.case_id = sim_case;
      cfg.validate();
      TrialOptions opt;
      opt.verbose = true;
      TrialRecord r = run_trial(cfg, opt, &std::cout);
      r.experiment = "simulate";
      write_csv_header(std::cout, true);
      write_csv_row(std::cout, r, true);
      return 0;
    }
    if (*exp) {
      ExperimentSpec spec;
      spec.name = exp_name;
      spec.base = experiment_defaults(exp_name);
      apply_args(spec.base, exp_cfg);
      spec.master_seed = *exp_seed_opt ? exp_seed : env_seed(1);
      spec.trials = exp_trials;
      if (!exp_powers.empty()) spec.powers = exp_powers;
      else if (exp_name == "fig2") spec.powers = {spec.base.power_dbm};
      spec.timing = timing;
      if (threads > 0) omp_set_num_threads(threads);
      run_experiment(spec, exp_out);
      std::cerr << "wrote " << exp_out << "\n";
      return 0;
    }
    if (*val) {
      load_config(val_path).validate();
      std::cout << val_path << ": ok\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace risisac
