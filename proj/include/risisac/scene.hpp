// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "risisac/core.hpp"
#include "risisac/geometry.hpp"

namespace risisac {

struct SceneConfig {
  int N_T = 64;
  int N_R = 16;
  int N_RIS = 128;
  int N_UT = 16;
  int M = 128;
  double df = 120e3;
  double fc = 0;  // 0: 26.5 GHz for case 1, 5 GHz otherwise
  double Ts = 0;  // 0: 1.07 / df
  double power_dbm = 50;
  double noise_dbm = -103;
  int case_id = 1;
  int L_BR = 0;  // 0: 3 on a LoS link, 6 on an NLoS link
  int L_BU = 0;
  int L_RU = 0;
  int T = 6;
  double ris_r_min = 20, ris_r_max = 40;
  double ut_r_min = 50, ut_r_max = 150;
  double tar_r_min = 50, tar_r_max = 150;
  double v_min = 10, v_max = 30;
  double rcs_min = 0, rcs_max = 0;  // both 0: [-15,10] for case 1, [-20,10] otherwise
  double angle_limit = 0.9;
  double los_nlos_db = 20;
  bool array_gain = true;
  bool noiseless = false;
  int B = 100;
  int I = 5;
  double rho_threshold = 0.5;
  std::uint64_t seed = 1;

  double fc_hz() const { return fc > 0 ? fc : (case_id == 1 ? 26.5e9 : 5e9); }
  double lambda() const { return kC / fc_hz(); }
  double Ts_s() const { return Ts > 0 ? Ts : 1.07 / df; }
  bool los_bu() const;
  bool los_br() const;
  bool los_ru() const;
  int paths_bu() const { return L_BU > 0 ? L_BU : (los_bu() ? 3 : 6); }
  int paths_br() const { return L_BR > 0 ? L_BR : (los_br() ? 3 : 6); }
  int paths_ru() const { return L_RU > 0 ? L_RU : (los_ru() ? 3 : 6); }
  double rcs_lo() const;
  double rcs_hi() const;

  // Throws ConfigError naming the violated constraint.
  void validate() const;
};

// key = value lines, '#' comments. Unknown keys are a ConfigError.
void apply_config_kv(SceneConfig& cfg, const std::string& key, const std::string& value);
// Applies every line of in on top of cfg.
void apply_config(SceneConfig& cfg, std::istream& in);
SceneConfig parse_config(std::istream& in);
SceneConfig load_config(const std::string& path);
void write_config(std::ostream& out, const SceneConfig& cfg);

double dbm_to_watt(double dbm);

struct PathRec {
  cd g;
  double tau = 0;  // one-way, s
  double aod = 0;  // spatial direction at the transmitting end
  double aoa = 0;  // spatial direction at the receiving end
  bool los = false;
  Vec2 scatterer;
  double length = 0;  // m
};

struct TargetRec {
  cd g;
  double range = 0;
  double vel = 0;  // positive toward the BS
  double theta = 0;
  double doppler = 0;  // 2 v / lambda
  double rcs_dbsm = 0;
  Vec2 pos;
  double tau() const { return 2 * range / kC; }
};

struct Scene {
  SceneConfig cfg;
  Pose bs;
  Pose ris;
  Pose ut;
  std::vector<PathRec> br;  // BS -> RIS, aod at BS, aoa at RIS
  std::vector<PathRec> bu;  // BS -> UT, aod at BS, aoa at UT
  std::vector<PathRec> ru;  // RIS -> UT, aod at RIS, aoa at UT
  std::vector<TargetRec> targets;
};

Scene synthesize_scene(const SceneConfig& cfg);

// Path record from explicit geometry (scatterer optional).
PathRec make_path(Vec2 from, Vec2 q_from, Vec2 to, Vec2 q_to, const Vec2* scatterer, double lambda);

}  // namespace risisac
