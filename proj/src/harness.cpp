// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#include "risisac/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>

#include "risisac/airlink.hpp"
#include "risisac/alignment.hpp"
#include "risisac/channel.hpp"
#include "risisac/paoe.hpp"
#include "risisac/rng.hpp"
#include "risisac/sbtts.hpp"

namespace risisac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs one stage; the first failure names the status, later stages still run.
void attempt(TrialRecord& rec, std::ostream* trace, const char* stage, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (rec.status == "ok") rec.status = errc_name(e.code());
    if (trace) *trace << stage << ": " << errc_name(e.code()) << ": " << e.what() << "\n";
  }
}

struct RisFit {
  Vec2 p;
  std::array<Vec2, 2> q{};           // one entry per candidate on a LoS link, q[0] otherwise
  std::array<double, 2> phi{};       // far-end angle candidates of the dominant path
  double aod = 0;                    // BS-side direction of the dominant path
  bool ambiguous = false;
};

std::size_t strongest(const std::vector<RisPathEstimate>& v) {
  if (v.empty()) throw Error(Errc::DetectionExhausted, "no RIS path estimated");
  std::size_t k = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i].gain) > std::abs(v[k].gain)) k = i;
  return k;
}

RisFit fit_ris(const std::vector<RisPathEstimate>& est, const SceneConfig& cfg) {
  const std::size_t k = strongest(est);
  const RisPathEstimate& d = est[k];
  RisFit f;
  f.aod = d.aod;
  f.phi = d.aoa_candidates;
  if (cfg.los_br()) {
    for (int i = 0; i < 2; ++i) {
      const PoseEstimate e = los_pose(d.range, d.aod, d.aoa_candidates[i]);
      f.p = e.p;
      f.q[i] = e.q;
    }
    f.ambiguous = true;
    return f;
  }
  std::vector<TdfsPath> paths;
  for (const RisPathEstimate& e : est)
    paths.push_back({e.aod, {e.aoa_candidates[0], e.aoa_candidates[1]}, e.range, std::norm(e.gain)});
  const TdfsResult r = tdfs(paths, cfg.B, cfg.I, Exec::serial);
  f.p = r.pose.p;
  f.q[0] = r.pose.q;
  // Candidate consistent with the fitted geometry.
  const Vec2 s = r.scatterers[k];
  if (!std::isnan(s.x)) {
    const double geo = spatial_dir(f.p, f.q[0], s);
    if (dir_dist(f.phi[1], geo) < dir_dist(f.phi[0], geo)) std::swap(f.phi[0], f.phi[1]);
  }
  return f;
}

Pose fit_ut(const std::vector<UtPathEstimate>& est, const SceneConfig& cfg) {
  if (est.empty()) throw Error(Errc::DetectionExhausted, "no BS-UT path estimated");
  if (cfg.los_bu()) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < est.size(); ++i)
      if (std::abs(est[i].beta) > std::abs(est[k].beta)) k = i;
    const PoseEstimate e = los_pose(est[k].range, est[k].aod, est[k].aoa);
    return {e.p, e.q};
  }
  std::vector<TdfsPath> paths;
  for (const UtPathEstimate& e : est) paths.push_back({e.aod, {e.aoa}, e.range, std::norm(e.beta)});
  const TdfsResult r = tdfs(paths, cfg.B, cfg.I, Exec::serial);
  return {r.pose.p, r.pose.q};
}

// Greedy nearest matching; mean distance over min(#est, #true) pairs.
double target_error(const std::vector<TargetEstimate>& est, const std::vector<TargetRec>& truth) {
  if (est.empty() || truth.empty()) return kNaN;
  std::vector<Vec2> e;
  for (const TargetEstimate& t : est) e.push_back(from_bs(t.range, t.theta));
  std::vector<char> ue(e.size(), 0), ut(truth.size(), 0);
  const std::size_t n = std::min(e.size(), truth.size());
  double sum = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (ue[i]) continue;
      for (std::size_t j = 0; j < truth.size(); ++j) {
        if (ut[j]) continue;
        const double d = dist(e[i], truth[j].pos);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    ue[bi] = ut[bj] = 1;
    sum += best;
  }
  return sum / static_cast<double>(n);
}

void put(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out << buf;
}

struct ExpInfo {
  const char* name;
  std::vector<int> cases;
};

const std::vector<ExpInfo>& table() {
  static const std::vector<ExpInfo> t{
      {"fig2", {1}},          {"pos-los", {1}},           {"gain-los", {1}},
      {"pos-nlos", {7}},      {"gain-nlos", {7}},         {"gain-cases35", {3, 5}},
      {"gain-cases2468", {2, 4, 6, 8}},
  };
  return t;
}

}  // namespace

TrialRecord run_trial(const SceneConfig& cfg, const TrialOptions& opt, std::ostream* trace) {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostream* tr = opt.verbose ? trace : nullptr;
  TrialRecord rec;
  rec.case_id = cfg.case_id;
  rec.p_dbm = cfg.power_dbm;
  rec.seed = cfg.seed;
  rec.err_ris = rec.err_ut = rec.err_tgt = rec.err_ris_spe = rec.err_tgt_spe = kNaN;
  rec.gain_prop = rec.gain_sweep = kNaN;
  rec.overhead_prop = overhead_for_case(cfg.case_id, cfg.N_T, cfg.N_RIS, cfg.N_UT);
  rec.overhead_sweep = static_cast<long long>(cfg.N_T) * cfg.N_RIS * cfg.N_UT;

  const Scene sc = synthesize_scene(cfg);
  const Codebooks cb = build_codebooks(cfg.N_T, cfg.N_RIS, cfg.N_UT);
  const EstParams ep = est_params(cfg);
  const double p = cfg.power_dbm;
  const ObservationStacks obs = simulate_all(sc, cb, p, mix_seed({cfg.seed, 0xA1}), Exec::serial);
  if (tr) {
    *tr << "scene: case " << cfg.case_id << ", " << p << " dBm, RIS (" << sc.ris.p.x << ", " << sc.ris.p.y
        << "), UT (" << sc.ut.p.x << ", " << sc.ut.p.y << "), " << sc.targets.size() << " targets\n";
  }

  RisFit ris;
  bool have_ris = false;
  attempt(rec, tr, "ipebtts", [&] {
    const SbttsResult r = run_ipebtts(obs.Y, cfg.paths_br(), cfg.T, ep, Exec::serial);
    if (tr) *tr << "ipebtts: " << std::string(r.branches.begin(), r.branches.end()) << ", " << r.ris.size()
                << " RIS paths, " << r.targets.size() << " targets\n";
    rec.err_tgt = target_error(r.targets, sc.targets);
    ris = fit_ris(r.ris, cfg);
    have_ris = true;
    rec.err_ris = dist(ris.p, sc.ris.p);
    if (tr) *tr << "ris: (" << ris.p.x << ", " << ris.p.y << "), error " << rec.err_ris << " m\n";
  });

  if (opt.spebtts) {
    attempt(rec, tr, "spebtts", [&] {
      const SbttsResult r = run_spebtts(obs.Y, cfg.paths_br(), cfg.T, ep, Exec::serial);
      rec.err_tgt_spe = target_error(r.targets, sc.targets);
      rec.err_ris_spe = dist(fit_ris(r.ris, cfg).p, sc.ris.p);
      if (tr) *tr << "spebtts: ris error " << rec.err_ris_spe << " m, target error " << rec.err_tgt_spe << " m\n";
    });
  }

  UtTrainingResult ut;
  Pose ut_pose;
  bool have_ut = false;
  attempt(rec, tr, "ut", [&] {
    Rng rng(mix_seed({cfg.seed, 0xA2}));
    const UtProbe probe = [&](int n, int t, int s) {
      return probe_symbol(sc, Link::downlink, cb.B[n], cb.R[s], cb.U[t], p, rng);
    };
    ut = run_ut_training(obs.Z, probe, cfg.paths_bu(), cfg.rho_threshold, ep);
    ut_pose = fit_ut(ut.paths, cfg);
    have_ut = true;
    rec.err_ut = dist(ut_pose.p, sc.ut.p);
    if (tr) *tr << "ut: " << ut.paths.size() << " paths, (" << ut_pose.p.x << ", " << ut_pose.p.y << "), error "
                << rec.err_ut << " m\n";
  });

  if (have_ris) {
    const CVec f = steering(cfg.N_T, ris.aod);
    if (cfg.los_ru()) {
      attempt(rec, tr, "align", [&] {
        if (!have_ut) throw Error(Errc::PositioningFailure, "no UT pose");
        Vec2 q_ris = ris.q[0];
        double phi = ris.phi[0];
        if (ris.ambiguous) {
          std::array<double, 2> th{};
          for (int i = 0; i < 2; ++i) th[i] = ru_angles(ris.p, ris.q[i], ut_pose.p, ut_pose.q).theta;
          const double phi_ru = ru_angles(ris.p, ris.q[0], ut_pose.p, ut_pose.q).phi;
          const CVec bs = steering(cfg.N_R, ris.aod), w = steering(cfg.N_UT, phi_ru);
          const double scale = cfg.array_gain ? std::sqrt(static_cast<double>(cfg.N_R) / cfg.N_T) : 1.0;
          const CVec direct = predicted_direct_uplink(ut.paths, bs, w, scale, cfg.M, cfg.df);
          Rng rng(mix_seed({cfg.seed, 0xA5}));
          const UplinkProbe probe = [&](const CVec& rv) {
            CVec y = probe_symbol(sc, Link::uplink, bs, rv, w, p, rng);
            for (std::size_t m = 0; m < y.size(); ++m) y[m] -= direct[m];
            return y;
          };
          const int pick = resolve_los_ambiguity(ris.phi, th, cfg.N_RIS, probe) - 1;
          q_ris = ris.q[pick];
          phi = ris.phi[pick];
          if (tr) *tr << "ambiguity: candidate " << pick + 1 << "\n";
        }
        const RuAngles a = ru_angles(ris.p, q_ris, ut_pose.p, ut_pose.q);
        rec.gain_prop = beamforming_gain(sc, f, ris_config(cfg.N_RIS, phi, a.theta), steering(cfg.N_UT, a.phi));
      });
    } else {
      attempt(rec, tr, "align", [&] {
        rec.gain_prop = restricted_sweep(sc, cb, f, p, mix_seed({cfg.seed, 0xA3}), Exec::serial).gain;
      });
    }
    if (tr) *tr << "gain: proposed " << rec.gain_prop << "\n";
  }

  if (opt.sweep) {
    attempt(rec, tr, "sweep", [&] {
      rec.gain_sweep = beam_sweep_baseline(sc, cb, p, mix_seed({cfg.seed, 0xA4}), Exec::serial).gain;
      if (tr) *tr << "gain: beam sweep " << rec.gain_sweep << "\n";
    });
  }
  rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> n = [] {
    std::vector<std::string> v;
    for (const ExpInfo& e : table()) v.emplace_back(e.name);
    return v;
  }();
  return n;
}

int experiment_id(const std::string& name) {
  for (std::size_t i = 0; i < table().size(); ++i)
    if (name == table()[i].name) return static_cast<int>(i);
  throw Error(Errc::ConfigError, "unknown experiment '" + name + "'");
}

std::vector<int> experiment_cases(const std::string& name) { return table()[experiment_id(name)].cases; }

SceneConfig experiment_defaults(const std::string& name) {
  SceneConfig c;
  c.case_id = experiment_cases(name).front();
  if (name == "fig2") {
    c.N_T = 32;
    c.N_R = 32;
    c.L_BR = 1;
    c.T = 1;
  }
  return c;
}

std::uint64_t trial_seed(std::uint64_t master, int exp_id, int power_idx, int trial_idx) {
  return mix_seed({master, static_cast<std::uint64_t>(exp_id), static_cast<std::uint64_t>(power_idx),
                   static_cast<std::uint64_t>(trial_idx)});
}

namespace {

void check_spec(const ExperimentSpec& spec) {
  experiment_id(spec.name);
  if (spec.trials < 1) throw Error(Errc::ConfigError, "trials must be >= 1");
  if (spec.powers.empty()) throw Error(Errc::ConfigError, "power list is empty");
  spec.base.validate();
}

}  // namespace

std::vector<TrialRecord> run_trials(const ExperimentSpec& spec) {
  check_spec(spec);
  const int id = experiment_id(spec.name);
  const std::vector<int> cases = experiment_cases(spec.name);
  struct Job {
    int pi, ti, c;
  };
  std::vector<Job> jobs;
  for (int pi = 0; pi < static_cast<int>(spec.powers.size()); ++pi)
    for (int ti = 0; ti < spec.trials; ++ti)
      for (int c : cases) jobs.push_back({pi, ti, c});
  TrialOptions opt;
  opt.spebtts = spec.name.rfind("pos", 0) == 0;
  opt.sweep = spec.name.rfind("gain", 0) == 0;

  std::vector<TrialRecord> out(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    SceneConfig cfg = spec.base;
    cfg.case_id = jobs[j].c;
    cfg.power_dbm = spec.powers[jobs[j].pi];
    cfg.seed = trial_seed(spec.master_seed, id, jobs[j].pi, jobs[j].ti);
    TrialRecord r;
    try {
      r = run_trial(cfg, opt);
    } catch (const Error& e) {
      r.case_id = cfg.case_id;
      r.p_dbm = cfg.power_dbm;
      r.seed = cfg.seed;
      r.err_ris = r.err_ut = r.err_tgt = r.err_ris_spe = r.err_tgt_spe = r.gain_prop = r.gain_sweep = kNaN;
      r.overhead_prop = overhead_for_case(cfg.case_id, cfg.N_T, cfg.N_RIS, cfg.N_UT);
      r.overhead_sweep = static_cast<long long>(cfg.N_T) * cfg.N_RIS * cfg.N_UT;
      r.status = errc_name(e.code());
    }
    r.experiment = spec.name;
    r.trial = jobs[j].ti;
    out[j] = std::move(r);
  }
  return out;
}

void write_csv_header(std::ostream& out, bool timing) {
  out << "experiment,case,p_dbm,trial,seed,err_ris,err_ut,err_tgt,err_ris_spe,err_tgt_spe,gain_prop,gain_sweep,"
         "overhead_prop,overhead_sweep,status";
  if (timing) out << ",runtime_ms";
  out << "\n";
}

void write_csv_row(std::ostream& out, const TrialRecord& r, bool timing) {
  out << r.experiment << ',' << r.case_id << ',';
  put(out, r.p_dbm);
  out << ',' << r.trial << ',' << r.seed;
  for (double v : {r.err_ris, r.err_ut, r.err_tgt, r.err_ris_spe, r.err_tgt_spe, r.gain_prop, r.gain_sweep}) {
    out << ',';
    put(out, v);
  }
  out << ',' << r.overhead_prop << ',' << r.overhead_sweep << ',' << r.status;
  if (timing) {
    out << ',';
    put(out, r.runtime_ms);
  }
  out << "\n";
}

void write_fig2(std::ostream& out, const ExperimentSpec& spec) {
  check_spec(spec);
  SceneConfig cfg = spec.base;
  cfg.power_dbm = spec.powers.front();
  cfg.seed = trial_seed(spec.master_seed, experiment_id(spec.name), 0, 0);
  const Scene sc = synthesize_scene(cfg);
  const Codebooks cb = build_codebooks(cfg.N_T, cfg.N_RIS, cfg.N_UT);
  const Stack Y = simulate_bs_stacks(sc, cb, cfg.power_dbm, mix_seed({cfg.seed, 0xA1}));
  Stack Yt, Yb;
  to_angle_delay(Y, Yt);
  to_doppler_delay(Yt, Yb);
  std::size_t beam = 0;
  double top = -1;
  for (std::size_t n = 0; n < Yt.size(); ++n)
    for (const cd& v : Yt[n].data)
      if (std::abs(v) > top) {
        top = std::abs(v);
        beam = n;
      }
  out << "domain,beam,row,col,magnitude\n";
  const std::pair<const char*, const Stack*> doms[] = {{"angle-delay", &Yt}, {"doppler-delay", &Yb}};
  for (const auto& [name, st] : doms) {
    const CMat& A = (*st)[beam];
    for (std::size_t r = 0; r < A.rows; ++r)
      for (std::size_t c = 0; c < A.cols; ++c) {
        out << name << ',' << beam << ',' << r << ',' << c << ',';
        put(out, std::abs(A(r, c)));
        out << "\n";
      }
  }
}

void run_experiment(const ExperimentSpec& spec, const std::string& path) {
  check_spec(spec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (spec.name == "fig2") {
    write_fig2(out, spec);
  } else {
    write_csv_header(out, spec.timing);
    for (const TrialRecord& r : run_trials(spec)) write_csv_row(out, r, spec.timing);
  }
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace risisac
