// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#include "risisac/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "risisac/rng.hpp"

namespace risisac {

namespace {

// (BS-UT, BS-RIS, RIS-UT) LoS flags per case 1..8
constexpr bool kCaseLos[8][3] = {
    {true, true, true},  {true, true, false},  {true, false, true},  {true, false, false},
    {false, true, true}, {false, true, false}, {false, false, true}, {false, false, false},
};

bool case_flag(int case_id, int which) {
  if (case_id < 1 || case_id > 8) throw Error(Errc::InvalidCase, "case id must be in 1..8");
  return kCaseLos[case_id - 1][which];
}

}  // namespace

bool SceneConfig::los_bu() const { return case_flag(case_id, 0); }
bool SceneConfig::los_br() const { return case_flag(case_id, 1); }
bool SceneConfig::los_ru() const { return case_flag(case_id, 2); }

double SceneConfig::rcs_lo() const {
  if (rcs_min != 0 || rcs_max != 0) return rcs_min;
  return case_id == 1 ? -15 : -20;
}

double SceneConfig::rcs_hi() const {
  if (rcs_min != 0 || rcs_max != 0) return rcs_max;
  return 10;
}

void SceneConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(Errc::ConfigError, m); };
  if (N_T < 1 || N_R < 1 || N_RIS < 1 || N_UT < 1) fail("array sizes must be >= 1");
  if (N_RIS < N_UT + 2) fail("N_RIS >= N_UT + 2 is required");
  if (M < 2) fail("M >= 2 is required");
  if (T < 0 || L_BR < 0 || L_BU < 0 || L_RU < 0) fail("path and target counts must be >= 0 (0 selects the case default)");
  if (case_id < 1 || case_id > 8) fail("case_id must be in 1..8");
  if (!(df > 0)) fail("df must be positive");
  if (fc < 0 || Ts < 0) fail("fc and Ts must be >= 0 (0 selects the default)");
  if (!(ris_r_min > 0 && ris_r_min < ris_r_max)) fail("ris range bounds must satisfy 0 < min < max");
  if (!(ut_r_min > 0 && ut_r_min < ut_r_max)) fail("ut range bounds must satisfy 0 < min < max");
  if (!(tar_r_min > 0 && tar_r_min < tar_r_max)) fail("target range bounds must satisfy 0 < min < max");
  if (!(v_min <= v_max)) fail("v_min <= v_max is required");
  if (!(rcs_lo() <= rcs_hi())) fail("rcs_min <= rcs_max is required");
  if (!(angle_limit > 0 && angle_limit < 1)) fail("angle_limit must be in (0, 1)");
  if (B < 2 || I < 1) fail("B >= 2 and I >= 1 are required");
  if (!(rho_threshold >= 0)) fail("rho_threshold must be >= 0");
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

namespace {

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw Error(Errc::ConfigError, "bad boolean '" + v + "'");
}

template <class T>
T parse_num(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw Error(Errc::ConfigError, "bad value for " + key + ": '" + v + "'");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_kv(SceneConfig& c, const std::string& key, const std::string& value) {
#define RISISAC_INT(name) \
  if (key == #name) { c.name = parse_num<int>(key, value); return; }
#define RISISAC_DBL(name) \
  if (key == #name) { c.name = parse_num<double>(key, value); return; }
  RISISAC_INT(N_T)
  RISISAC_INT(N_R)
  RISISAC_INT(N_RIS)
  RISISAC_INT(N_UT)
  RISISAC_INT(M)
  RISISAC_DBL(df)
  RISISAC_DBL(fc)
  RISISAC_DBL(Ts)
  RISISAC_DBL(power_dbm)
  RISISAC_DBL(noise_dbm)
  RISISAC_INT(case_id)
  RISISAC_INT(L_BR)
  RISISAC_INT(L_BU)
  RISISAC_INT(L_RU)
  RISISAC_INT(T)
  RISISAC_DBL(ris_r_min)
  RISISAC_DBL(ris_r_max)
  RISISAC_DBL(ut_r_min)
  RISISAC_DBL(ut_r_max)
  RISISAC_DBL(tar_r_min)
  RISISAC_DBL(tar_r_max)
  RISISAC_DBL(v_min)
  RISISAC_DBL(v_max)
  RISISAC_DBL(rcs_min)
  RISISAC_DBL(rcs_max)
  RISISAC_DBL(angle_limit)
  RISISAC_DBL(los_nlos_db)
  RISISAC_INT(B)
  RISISAC_INT(I)
  RISISAC_DBL(rho_threshold)
#undef RISISAC_INT
#undef RISISAC_DBL
  if (key == "array_gain") { c.array_gain = parse_bool(value); return; }
  if (key == "noiseless") { c.noiseless = parse_bool(value); return; }
  if (key == "seed") { c.seed = parse_num<std::uint64_t>(key, value); return; }
  throw Error(Errc::ConfigError, "unknown key '" + key + "'");
}

void apply_config(SceneConfig& cfg, std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    apply_config_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

SceneConfig parse_config(std::istream& in) {
  SceneConfig cfg;
  apply_config(cfg, in);
  return cfg;
}

SceneConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open config '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& o, const SceneConfig& c) {
  o << std::setprecision(17);
  o << "N_T = " << c.N_T << "\nN_R = " << c.N_R << "\nN_RIS = " << c.N_RIS << "\nN_UT = " << c.N_UT
    << "\nM = " << c.M << "\ndf = " << c.df << "\nfc = " << c.fc << "\nTs = " << c.Ts
    << "\npower_dbm = " << c.power_dbm << "\nnoise_dbm = " << c.noise_dbm << "\ncase_id = " << c.case_id
    << "\nL_BR = " << c.L_BR << "\nL_BU = " << c.L_BU << "\nL_RU = " << c.L_RU << "\nT = " << c.T
    << "\nris_r_min = " << c.ris_r_min << "\nris_r_max = " << c.ris_r_max << "\nut_r_min = " << c.ut_r_min
    << "\nut_r_max = " << c.ut_r_max << "\ntar_r_min = " << c.tar_r_min << "\ntar_r_max = " << c.tar_r_max
    << "\nv_min = " << c.v_min << "\nv_max = " << c.v_max << "\nrcs_min = " << c.rcs_min
    << "\nrcs_max = " << c.rcs_max << "\nangle_limit = " << c.angle_limit << "\nlos_nlos_db = " << c.los_nlos_db
    << "\narray_gain = " << (c.array_gain ? 1 : 0) << "\nnoiseless = " << (c.noiseless ? 1 : 0)
    << "\nB = " << c.B << "\nI = " << c.I << "\nrho_threshold = " << c.rho_threshold << "\nseed = " << c.seed
    << "\n";
}

PathRec make_path(Vec2 from, Vec2 q_from, Vec2 to, Vec2 q_to, const Vec2* s, double lambda) {
  PathRec p;
  const Vec2 first = s ? *s : to;
  const Vec2 last = s ? *s : from;
  p.aod = spatial_dir(from, q_from, first);
  p.aoa = spatial_dir(to, q_to, last);
  p.length = s ? dist(from, *s) + dist(*s, to) : dist(from, to);
  p.tau = p.length / kC;
  p.los = s == nullptr;
  if (s) p.scatterer = *s;
  p.g = lambda / (4 * kPi * p.length);
  return p;
}

namespace {

bool faces(Vec2 node, Vec2 q, Vec2 target, double a) {
  const Vec2 l = unit(target - node);
  return dot(l, q) > 0 && std::abs(cross(l, q)) <= a;
}

bool draw_orientation(Rng& rng, Vec2 node, std::initializer_list<Vec2> partners, double a, Vec2& q) {
  for (int k = 0; k < 200; ++k) {
    const double ang = uniform(rng, 0, 2 * kPi);
    Vec2 c{std::cos(ang), std::sin(ang)};
    bool ok = true;
    for (Vec2 p : partners) ok = ok && faces(node, c, p, a);
    if (ok) {
      q = c;
      return true;
    }
  }
  return false;
}

struct LinkSpec {
  Pose from;
  Pose to;
  bool los;
  int L;
  bool from_is_bs;
};

bool draw_link(Rng& rng, const SceneConfig& cfg, const LinkSpec& ls, const std::vector<Vec2>& nodes,
               std::vector<PathRec>& out) {
  const double lambda = cfg.lambda();
  const double a = cfg.angle_limit;
  const double min_sep = 0.5 * kC / (cfg.M * cfg.df);
  const double span = dist(ls.from.p, ls.to.p);
  out.clear();
  if (ls.los) out.push_back(make_path(ls.from.p, ls.from.q, ls.to.p, ls.to.q, nullptr, lambda));
  const int need = ls.los ? ls.L - 1 : ls.L;
  for (int k = 0; k < need; ++k) {
    bool placed = false;
    for (int tries = 0; tries < 400 && !placed; ++tries) {
      const double d = uniform(rng, 0.1 * span, 1.5 * span);
      const double s = uniform(rng, -a, a);
      const Vec2 dir = rotate_sin(ls.from.q, -s);
      const Vec2 sc = ls.from.p + d * dir;
      if (ls.from_is_bs && sc.y <= 0) continue;
      bool clear = true;
      for (Vec2 n : nodes) clear = clear && dist(n, sc) >= 2.0;
      if (!clear || !faces(ls.to.p, ls.to.q, sc, a)) continue;
      PathRec p = make_path(ls.from.p, ls.from.q, ls.to.p, ls.to.q, &sc, lambda);
      bool distinct = true;
      for (const PathRec& o : out) distinct = distinct && std::abs(o.length - p.length) >= min_sep;
      if (!distinct) continue;
      out.push_back(p);
      placed = true;
    }
    if (!placed) return false;
  }
  const double nlos_scale = std::pow(10.0, -cfg.los_nlos_db / 20.0);
  for (PathRec& p : out) {
    double amp = std::abs(p.g);
    if (ls.los && !p.los) amp = std::abs(out[0].g) * nlos_scale;
    p.g = std::polar(amp, uniform(rng, 0, 2 * kPi));
  }
  return true;
}

}  // namespace

Scene synthesize_scene(const SceneConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed({cfg.seed, 0x5CE7Eull}));
  const double a = cfg.angle_limit;
  const double lambda = cfg.lambda();
  Scene sc;
  sc.cfg = cfg;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    sc.ris.p = from_bs(uniform(rng, cfg.ris_r_min, cfg.ris_r_max), uniform(rng, -a, a));
    sc.ut.p = from_bs(uniform(rng, cfg.ut_r_min, cfg.ut_r_max), uniform(rng, -a, a));
    if (dist(sc.ris.p, sc.ut.p) < 2.0) continue;
    if (!draw_orientation(rng, sc.ris.p, {sc.bs.p, sc.ut.p}, a, sc.ris.q)) continue;
    if (!draw_orientation(rng, sc.ut.p, {sc.bs.p, sc.ris.p}, a, sc.ut.q)) continue;
    const std::vector<Vec2> nodes{sc.bs.p, sc.ris.p, sc.ut.p};
    if (!draw_link(rng, cfg, {sc.bs, sc.ris, cfg.los_br(), cfg.paths_br(), true}, nodes, sc.br)) continue;
    if (!draw_link(rng, cfg, {sc.bs, sc.ut, cfg.los_bu(), cfg.paths_bu(), true}, nodes, sc.bu)) continue;
    if (!draw_link(rng, cfg, {sc.ris, sc.ut, cfg.los_ru(), cfg.paths_ru(), false}, nodes, sc.ru)) continue;
    sc.targets.clear();
    for (int l = 0; l < cfg.T; ++l) {
      TargetRec t;
      t.range = uniform(rng, cfg.tar_r_min, cfg.tar_r_max);
      t.theta = uniform(rng, -a, a);
      t.vel = uniform(rng, cfg.v_min, cfg.v_max);
      t.rcs_dbsm = uniform(rng, cfg.rcs_lo(), cfg.rcs_hi());
      t.pos = from_bs(t.range, t.theta);
      t.doppler = 2 * t.vel / lambda;
      const double sigma = std::pow(10.0, t.rcs_dbsm / 10.0);
      const double amp = std::sqrt(lambda * lambda * sigma / (std::pow(4 * kPi, 3) * std::pow(t.range, 4)));
      t.g = std::polar(amp, uniform(rng, 0, 2 * kPi));
      sc.targets.push_back(t);
    }
    return sc;
  }
  throw Error(Errc::GenerationError, "no feasible geometry after 1000 redraws");
}

}  // namespace risisac
