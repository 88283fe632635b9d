// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "risisac/scene.hpp"

namespace risisac {

// One Monte Carlo trial. Positioning errors are NaN (written "nan") when the stage failed; status then names
// the error.
struct TrialRecord {
  std::string experiment;
  int case_id = 1;
  double p_dbm = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double err_ris = 0;      // IPEBTTS
  double err_ut = 0;
  double err_tgt = 0;      // mean over matched targets, IPEBTTS
  double err_ris_spe = 0;  // SPEBTTS
  double err_tgt_spe = 0;
  double gain_prop = 0;
  double gain_sweep = 0;
  long long overhead_prop = 0;
  long long overhead_sweep = 0;
  double runtime_ms = 0;
  std::string status = "ok";
};

struct TrialOptions {
  bool spebtts = true;  // also run the separate-estimation baseline
  bool sweep = true;    // also run the exhaustive beam sweep
  bool verbose = false;
};

// Full pipeline on one scene: synthesize, simulate, estimate, position, align, score. The scene is drawn from
// cfg with cfg.seed; cfg.power_dbm is the transmit power. Trace lines go to *trace when verbose.
TrialRecord run_trial(const SceneConfig& cfg, const TrialOptions& opt = {}, std::ostream* trace = nullptr);

struct ExperimentSpec {
  std::string name;  // fig2, pos-los, gain-los, pos-nlos, gain-nlos, gain-cases35, gain-cases2468
  std::vector<double> powers{20, 30, 40, 50};
  int trials = 50;
  std::uint64_t master_seed = 1;
  SceneConfig base;  // overrides; case_id is set per experiment
  bool timing = false;  // adds the runtime_ms column (breaks byte-identical reruns)
};

const std::vector<std::string>& experiment_names();
// Index used in seed derivation. Throws ConfigError for unknown names.
int experiment_id(const std::string& name);
std::vector<int> experiment_cases(const std::string& name);

// Base configuration of a named experiment before user overrides.
SceneConfig experiment_defaults(const std::string& name);

// mix_seed({master, experiment id, power index, trial index}); the same seed is reused across the cases of a
// multi-case experiment so cases see paired scenes.
std::uint64_t trial_seed(std::uint64_t master, int exp_id, int power_idx, int trial_idx);

// Trials in parallel, gathered in (power, trial, case) order.
std::vector<TrialRecord> run_trials(const ExperimentSpec& spec);

void write_csv_header(std::ostream& out, bool timing);
void write_csv_row(std::ostream& out, const TrialRecord& r, bool timing);

// fig2: one trial, long format "domain,beam,row,col,magnitude" for the peak beam in both domains.
void write_fig2(std::ostream& out, const ExperimentSpec& spec);

// Writes the CSV for spec to path. Throws ConfigError for an invalid spec and std::runtime_error on I/O.
void run_experiment(const ExperimentSpec& spec, const std::string& path);

int cli_main(int argc, char** argv);

}  // namespace risisac
