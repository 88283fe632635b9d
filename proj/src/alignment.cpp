// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#include "risisac/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "risisac/airlink.hpp"
#include "risisac/rng.hpp"

namespace risisac {

RuAngles ru_angles(Vec2 p_ris, Vec2 q_ris, Vec2 p_ut, Vec2 q_ut) {
  if (dist(p_ris, p_ut) == 0) throw Error(Errc::CoincidentPositions, "RIS and UT positions coincide");
  const Vec2 k = unit(p_ris - p_ut);
  if (std::abs(k.x) < 1e-9) return {-cross(k, q_ris), cross(k, q_ut)};
  return {-(q_ris.y - k.y * dot(k, q_ris)) / k.x, (q_ut.y - k.y * dot(k, q_ut)) / k.x};
}

CVec ris_config(int N_RIS, double phi_br, double theta_ru) {
  CVec v = steering(N_RIS, -phi_br - theta_ru);
  const double s = std::sqrt(static_cast<double>(N_RIS));
  for (cd& x : v) x *= s;
  return v;
}

int resolve_los_ambiguity(const std::array<double, 2>& phi_br, const std::array<double, 2>& theta_ru, int N_RIS,
                          const UplinkProbe& probe) {
  if (!probe) throw Error(Errc::NoSignal, "no uplink probe available");
  double mag[2];
  for (int i = 0; i < 2; ++i) {
    const CVec y = probe(ris_config(N_RIS, phi_br[i], theta_ru[i]));
    double acc = 0;
    for (const cd& v : y) acc += std::abs(v);
    mag[i] = y.empty() ? 0 : acc / y.size();
  }
  return mag[0] >= mag[1] ? 1 : 2;
}

CVec predicted_direct_uplink(const std::vector<UtPathEstimate>& paths, const CVec& bs, const CVec& ut, double scale,
                             int M, double df) {
  CVec out(M);
  const int nr = static_cast<int>(bs.size()), nu = static_cast<int>(ut.size());
  for (const UtPathEstimate& e : paths) {
    if (!e.direct) continue;
    const CVec a_ut = steering(nu, e.aoa);
    cd ut_term = 0;
    for (int k = 0; k < nu; ++k) ut_term += a_ut[k] * ut[k];
    const cd c = e.beta * scale * dot_h(bs, steering(nr, e.aod)) * ut_term;
    for (int m = 0; m < M; ++m) out[m] += c * std::polar(1.0, -2 * kPi * m * e.tau * df);
  }
  return out;
}

long long overhead_for_case(int case_id, int N_T, int N_RIS, int N_UT) {
  const long long base = static_cast<long long>(N_T) * N_RIS;
  switch (case_id) {
    case 1:
    case 5:
      return base + 2;
    case 3:
    case 7:
      return base;
    case 2:
    case 4:
    case 6:
    case 8:
      return base + static_cast<long long>(N_RIS) * N_UT;
    default:
      throw Error(Errc::InvalidCase, "case id must be in 1..8");
  }
}

namespace {

double spectrum_at(const CVec& y, double w) {
  cd acc = 0;
  for (std::size_t m = 0; m < y.size(); ++m) acc += y[m] * std::polar(1.0, w * static_cast<double>(m));
  return std::abs(acc);
}

// max over w of |sum_m y_m e^{j m w}|: DFT bin, then golden section over the two neighboring bins.
double max_spectrum(const CVec& y) {
  const int M = static_cast<int>(y.size());
  CVec X = y;
  fft_backward(X.data(), M);
  int k = 0;
  for (int i = 1; i < M; ++i)
    if (std::abs(X[i]) > std::abs(X[k])) k = i;
  const double step = 2 * kPi / M;
  double a = (k - 1) * step, b = (k + 1) * step;
  const double r = (std::sqrt(5.0) - 1) / 2;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = spectrum_at(y, c), fd = spectrum_at(y, d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = spectrum_at(y, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = spectrum_at(y, d);
    }
  }
  return std::max({std::abs(X[k]), fc, fd});
}

double dominant(const std::vector<PathRec>& v) {
  double g = 0;
  for (const PathRec& p : v) g = std::max(g, std::abs(p.g));
  return g;
}

double gain_norm(const Scene& sc) {
  const SceneConfig& c = sc.cfg;
  double n = dominant(sc.br) * dominant(sc.ru) * c.M;
  if (!c.array_gain) n /= std::sqrt(static_cast<double>(c.N_T) * c.N_UT) * c.N_RIS;
  return n;
}

// Beams given as per-path BS factors bsf[beam][u]; searches RIS codeword s and UT codeword t.
SweepResult sweep(const Scene& sc, const Codebooks& cb, const std::vector<std::vector<cd>>& bsf, double p_dbm,
                  std::uint64_t seed, Exec ex) {
  const SceneConfig& c = sc.cfg;
  const int M = c.M, NB = static_cast<int>(bsf.size()), NS = c.N_RIS, NU = c.N_UT;
  const int R = static_cast<int>(sc.ru.size()), U = static_cast<int>(sc.br.size());
  const ArrayGains ag = array_gains(c);
  const double amp = std::sqrt(dbm_to_watt(p_dbm));
  const double bin_var = c.M * noise_variance(c);

  // Per (r, u): coefficient, subcarrier spectrum and RIS reflection per codeword.
  std::vector<cd> coef(R * U);
  std::vector<CVec> D(R * U, CVec(M));
  std::vector<CVec> refl(R * U, CVec(NS));
  for (int r = 0; r < R; ++r) {
    const CVec a_ut = steering(c.N_RIS, sc.ru[r].aod);
    for (int u = 0; u < U; ++u) {
      const int p = r * U + u;
      coef[p] = sc.ru[r].g * sc.br[u].g * ag.Ht * ag.GT;
      const double tau = sc.ru[r].tau + sc.br[u].tau;
      for (int k = 0; k < M; ++k) D[p][k] = dirichlet(M, 2 * kPi * k / M - 2 * kPi * tau * c.df);
      const CVec a_bs = steering(c.N_RIS, sc.br[u].aoa);
      for (int s = 0; s < NS; ++s) {
        cd acc = 0;
        for (int i = 0; i < NS; ++i) acc += a_ut[i] * cb.R[s][i] * a_bs[i];
        refl[p][s] = acc;
      }
    }
  }
  std::vector<CVec> utf(R, CVec(NU));
  for (int r = 0; r < R; ++r)
    for (int t = 0; t < NU; ++t) utf[r][t] = dot_h(cb.U[t], steering(NU, sc.ru[r].aoa));

  struct Best {
    double val = -1;
    int s = 0, t = 0;
  };
  std::vector<Best> best(NB);
#pragma omp parallel for schedule(dynamic) if (ex == Exec::parallel)
  for (int n = 0; n < NB; ++n) {
    Rng rng(mix_seed({seed, 0x5B, static_cast<std::uint64_t>(n)}));
    std::vector<CVec> A(R, CVec(M));
    CVec X(M);
    Best b;
    for (int s = 0; s < NS; ++s) {
      for (int r = 0; r < R; ++r) {
        std::fill(A[r].begin(), A[r].end(), cd(0));
        for (int u = 0; u < U; ++u) {
          const int p = r * U + u;
          const cd w = coef[p] * refl[p][s] * bsf[n][u];
          for (int k = 0; k < M; ++k) A[r][k] += w * D[p][k];
        }
      }
      for (int t = 0; t < NU; ++t) {
        std::fill(X.begin(), X.end(), cd(0));
        for (int r = 0; r < R; ++r) {
          const cd w = amp * utf[r][t];
          for (int k = 0; k < M; ++k) X[k] += w * A[r][k];
        }
        double v = 0;
        for (int k = 0; k < M; ++k) {
          const cd x = bin_var > 0 ? X[k] + cnormal(rng, bin_var) : X[k];
          v = std::max(v, std::abs(x));
        }
        if (v > b.val) b = {v, s, t};
      }
    }
    best[n] = b;
  }
  SweepResult res;
  double top = -1;
  for (int n = 0; n < NB; ++n)
    if (best[n].val > top) {
      top = best[n].val;
      res.n = n;
      res.s = best[n].s;
      res.t = best[n].t;
    }
  res.evaluations = static_cast<long long>(NB) * NS * NU;
  return res;
}

}  // namespace

double beamforming_gain(const Scene& sc, const CVec& f, const CVec& rv, const CVec& w) {
  const double n = gain_norm(sc);
  if (!(n > 0)) return 0;
  return max_spectrum(link_response(sc, Link::downlink, f, rv, w, false)) / n;
}

SweepResult beam_sweep_baseline(const Scene& sc, const Codebooks& cb, double p_dbm, std::uint64_t seed, Exec ex) {
  std::vector<std::vector<cd>> bsf(cb.B.size(), std::vector<cd>(sc.br.size()));
  for (std::size_t n = 0; n < cb.B.size(); ++n)
    for (std::size_t u = 0; u < sc.br.size(); ++u) bsf[n][u] = dot_h(steering(sc.cfg.N_T, sc.br[u].aod), cb.B[n]);
  SweepResult r = sweep(sc, cb, bsf, p_dbm, seed, ex);
  r.gain = beamforming_gain(sc, cb.B[r.n], cb.R[r.s], cb.U[r.t]);
  return r;
}

SweepResult restricted_sweep(const Scene& sc, const Codebooks& cb, const CVec& f, double p_dbm, std::uint64_t seed,
                             Exec ex) {
  if (static_cast<int>(f.size()) != sc.cfg.N_T) throw Error(Errc::InvalidDimension, "beamformer size mismatch");
  std::vector<std::vector<cd>> bsf(1, std::vector<cd>(sc.br.size()));
  for (std::size_t u = 0; u < sc.br.size(); ++u) bsf[0][u] = dot_h(steering(sc.cfg.N_T, sc.br[u].aod), f);
  SweepResult r = sweep(sc, cb, bsf, p_dbm, seed, ex);
  r.n = -1;
  r.gain = beamforming_gain(sc, f, cb.R[r.s], cb.U[r.t]);
  return r;
}

}  // namespace risisac
