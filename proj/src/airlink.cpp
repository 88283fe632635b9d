// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#include "risisac/airlink.hpp"

#include <cmath>

namespace risisac {

namespace {

constexpr std::uint64_t kTagY = 0x59;
constexpr std::uint64_t kTagZ = 0x5A;

CVec delay_ladder(double tau, const SceneConfig& c) {
  CVec l(c.M);
  for (int m = 0; m < c.M; ++m) l[m] = std::polar(1.0, -2 * kPi * m * tau * c.df);
  return l;
}

void check_codebooks(const SceneConfig& c, const Codebooks& cb) {
  if (static_cast<int>(cb.B.size()) != c.N_T || static_cast<int>(cb.R.size()) != c.N_RIS ||
      static_cast<int>(cb.U.size()) != c.N_UT)
    throw Error(Errc::InvalidDimension, "codebooks do not match the scene dimensions");
}

void add_noise(CMat& y, double var, std::uint64_t seed) {
  if (var <= 0) return;
  Rng rng(seed);
  for (cd& v : y.data) v += cnormal(rng, var);
}

struct PairTerm {
  cd coef;         // everything but the beam-dependent factors
  double ris_dir;  // sum of the two RIS-side directions
  CVec ladder;
  std::size_t bs_path;  // index into sc.br for the BS-side factor
  std::size_t far_path; // index of the other path (br for Y, ru for Z)
};

}  // namespace

double noise_variance(const SceneConfig& cfg) { return cfg.noiseless ? 0.0 : dbm_to_watt(cfg.noise_dbm); }

Stack simulate_bs_stacks(const Scene& sc, const Codebooks& cb, double p_dbm, std::uint64_t noise_seed, Exec ex) {
  const SceneConfig& c = sc.cfg;
  check_codebooks(c, cb);
  const ArrayGains ag = array_gains(c);
  const double amp = std::sqrt(dbm_to_watt(p_dbm));
  const double var = noise_variance(c);
  std::vector<PairTerm> pairs;
  for (std::size_t r = 0; r < sc.br.size(); ++r)
    for (std::size_t u = 0; u < sc.br.size(); ++u)
      pairs.push_back({amp * ag.GR * ag.GT * sc.br[r].g * sc.br[u].g, sc.br[r].aoa + sc.br[u].aoa,
                       delay_ladder(sc.br[r].tau + sc.br[u].tau, c), u, r});
  std::vector<CVec> tar_ladder;
  for (const TargetRec& t : sc.targets) tar_ladder.push_back(delay_ladder(t.tau(), c));
  const double Ts = c.Ts_s();

  Stack Y(c.N_T, CMat(c.N_RIS, c.M));
#pragma omp parallel for schedule(dynamic) if (ex == Exec::parallel)
  for (int n = 0; n < c.N_T; ++n) {
    const double cn = codeword_dir(n, c.N_T);
    CMat& y = Y[n];
    for (const PairTerm& pt : pairs) {
      const cd k = pt.coef * steer_inner(c.N_R, cn, sc.br[pt.far_path].aod) * steer_inner(c.N_T, sc.br[pt.bs_path].aod, cn);
      for (int s = 0; s < c.N_RIS; ++s) {
        const cd ks = k * steer_inner(c.N_RIS, 0.0, pt.ris_dir + codeword_dir(s, c.N_RIS));
        cd* row = y.row(s);
        for (int m = 0; m < c.M; ++m) row[m] += ks * pt.ladder[m];
      }
    }
    for (std::size_t l = 0; l < sc.targets.size(); ++l) {
      const TargetRec& t = sc.targets[l];
      const cd k = amp * ag.Hr * t.g * steer_inner(c.N_R, cn, t.theta) * steer_inner(c.N_T, t.theta, cn);
      for (int s = 0; s < c.N_RIS; ++s) {
        const double p0 = static_cast<double>(n) * c.N_RIS + s;
        const cd ks = k * std::polar(1.0, 2 * kPi * p0 * t.doppler * Ts);
        cd* row = y.row(s);
        for (int m = 0; m < c.M; ++m) row[m] += ks * tar_ladder[l][m];
      }
    }
    add_noise(y, var, mix_seed({noise_seed, kTagY, static_cast<std::uint64_t>(n)}));
  }
  return Y;
}

Stack simulate_ut_stacks(const Scene& sc, const Codebooks& cb, double p_dbm, std::uint64_t noise_seed, Exec ex) {
  const SceneConfig& c = sc.cfg;
  check_codebooks(c, cb);
  if (c.N_RIS < c.N_UT + 2) throw Error(Errc::ConfigError, "N_RIS >= N_UT + 2 is required");
  const ArrayGains ag = array_gains(c);
  const double amp = std::sqrt(dbm_to_watt(p_dbm));
  const double var = noise_variance(c);
  std::vector<PairTerm> pairs;
  for (std::size_t r = 0; r < sc.ru.size(); ++r)
    for (std::size_t u = 0; u < sc.br.size(); ++u)
      pairs.push_back({amp * ag.Ht * ag.GT * sc.ru[r].g * sc.br[u].g, sc.ru[r].aod + sc.br[u].aoa,
                       delay_ladder(sc.ru[r].tau + sc.br[u].tau, c), u, r});
  std::vector<CVec> bu_ladder;
  for (const PathRec& q : sc.bu) bu_ladder.push_back(delay_ladder(q.tau, c));

  Stack Z(c.N_T, CMat(c.N_UT, c.M));
#pragma omp parallel for schedule(dynamic) if (ex == Exec::parallel)
  for (int n = 0; n < c.N_T; ++n) {
    const double cn = codeword_dir(n, c.N_T);
    CMat& z = Z[n];
    for (int t = 0; t < c.N_UT; ++t) {
      const double ct = codeword_dir(t, c.N_UT);
      cd* row = z.row(t);
      for (std::size_t l = 0; l < sc.bu.size(); ++l) {
        const PathRec& q = sc.bu[l];
        const cd k = amp * ag.Hc * q.g * steer_inner(c.N_UT, ct, q.aoa) * steer_inner(c.N_T, q.aod, cn);
        for (int m = 0; m < c.M; ++m) row[m] += k * bu_ladder[l][m];
      }
      for (const PairTerm& pt : pairs) {
        const cd k = pt.coef * steer_inner(c.N_UT, ct, sc.ru[pt.far_path].aoa) *
                     steer_inner(c.N_T, sc.br[pt.bs_path].aod, cn) *
                     steer_inner(c.N_RIS, 0.0, pt.ris_dir + codeword_dir(t, c.N_RIS));
        for (int m = 0; m < c.M; ++m) row[m] += k * pt.ladder[m];
      }
    }
    add_noise(z, var, mix_seed({noise_seed, kTagZ, static_cast<std::uint64_t>(n)}));
  }
  return Z;
}

ObservationStacks simulate_all(const Scene& sc, const Codebooks& cb, double p_dbm, std::uint64_t noise_seed,
                               Exec ex) {
  ObservationStacks o;
  o.Y = simulate_bs_stacks(sc, cb, p_dbm, noise_seed, ex);
  o.Z = simulate_ut_stacks(sc, cb, p_dbm, noise_seed, ex);
  o.sigma_r2 = o.sigma_c2 = noise_variance(sc.cfg);
  return o;
}

CVec probe_symbol(const Scene& sc, Link dir, const CVec& bs, const CVec& rv, const CVec& ut, double p_dbm,
                  Rng& rng) {
  CVec y = link_response(sc, dir, bs, rv, ut);
  const double amp = std::sqrt(dbm_to_watt(p_dbm));
  const double var = noise_variance(sc.cfg);
  for (cd& v : y) {
    v *= amp;
    if (var > 0) v += cnormal(rng, var);
  }
  return y;
}

}  // namespace risisac
