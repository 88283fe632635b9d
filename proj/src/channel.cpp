// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#include "risisac/channel.hpp"

#include <cmath>

namespace risisac {

Codebooks build_codebooks(int N_T, int N_RIS, int N_UT) {
  if (N_T < 1 || N_RIS < 1 || N_UT < 1) throw Error(Errc::InvalidDimension, "codebook sizes must be >= 1");
  Codebooks cb;
  for (int n = 0; n < N_T; ++n) cb.B.push_back(steering(N_T, codeword_dir(n, N_T)));
  const double s = std::sqrt(static_cast<double>(N_RIS));
  for (int k = 0; k < N_RIS; ++k) {
    CVec r = steering(N_RIS, codeword_dir(k, N_RIS));
    for (cd& v : r) v *= s;
    cb.R.push_back(r);
  }
  for (int t = 0; t < N_UT; ++t) cb.U.push_back(steering(N_UT, codeword_dir(t, N_UT)));
  return cb;
}

ArrayGains array_gains(const SceneConfig& c) {
  ArrayGains a;
  if (!c.array_gain) return a;
  auto g = [](int x, int y) { return std::sqrt(static_cast<double>(x) * y); };
  a.GT = g(c.N_RIS, c.N_T);
  a.GR = g(c.N_R, c.N_RIS);
  a.Hc = g(c.N_UT, c.N_T);
  a.Ht = g(c.N_UT, c.N_RIS);
  a.Hr = g(c.N_R, c.N_T);
  return a;
}

namespace {

cd ladder(double tau, double df, int m) { return std::polar(1.0, -2 * kPi * (m - 1) * tau * df); }

// acc += c * a b^T (conj_b: a b^H)
void add_outer(CMat& acc, cd c, const CVec& a, const CVec& b, bool conj_b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) acc(i, j) += c * a[i] * (conj_b ? std::conj(b[j]) : b[j]);
}

}  // namespace

ChannelSet channels_at(const Scene& sc, int m, int p) {
  const SceneConfig& c = sc.cfg;
  if (m < 1 || m > c.M) throw Error(Errc::IndexOutOfRange, "subcarrier index out of range");
  if (p < 1) throw Error(Errc::IndexOutOfRange, "symbol index must be >= 1");
  const ArrayGains ag = array_gains(c);
  ChannelSet ch{CMat(c.N_RIS, c.N_T), CMat(c.N_R, c.N_RIS), CMat(c.N_UT, c.N_T), CMat(c.N_UT, c.N_RIS),
                CMat(c.N_R, c.N_T)};
  for (const PathRec& q : sc.br) {
    const cd z = q.g * ladder(q.tau, c.df, m);
    add_outer(ch.G_T, z * ag.GT, steering(c.N_RIS, q.aoa), steering(c.N_T, q.aod), true);
    add_outer(ch.G_R, z * ag.GR, steering(c.N_R, q.aod), steering(c.N_RIS, q.aoa), false);
  }
  for (const PathRec& q : sc.bu)
    add_outer(ch.H_c, q.g * ladder(q.tau, c.df, m) * ag.Hc, steering(c.N_UT, q.aoa), steering(c.N_T, q.aod), true);
  for (const PathRec& q : sc.ru)
    add_outer(ch.H_t, q.g * ladder(q.tau, c.df, m) * ag.Ht, steering(c.N_UT, q.aoa), steering(c.N_RIS, q.aod),
              false);
  for (const TargetRec& t : sc.targets) {
    const cd gam = t.g * ladder(t.tau(), c.df, m) * std::polar(1.0, 2 * kPi * (p - 1) * t.doppler * c.Ts_s());
    add_outer(ch.H_r, gam * ag.Hr, steering(c.N_R, t.theta), steering(c.N_T, t.theta), true);
  }
  return ch;
}

CVec link_response(const Scene& sc, Link dir, const CVec& bs, const CVec& rv, const CVec& ut, bool include_direct) {
  const SceneConfig& c = sc.cfg;
  const bool up = dir == Link::uplink;
  const int n_bs = up ? c.N_R : c.N_T;
  if (static_cast<int>(bs.size()) != n_bs || static_cast<int>(rv.size()) != c.N_RIS ||
      static_cast<int>(ut.size()) != c.N_UT)
    throw Error(Errc::InvalidDimension, "beam or RIS vector size mismatch");
  const ArrayGains ag = array_gains(c);
  const double g_direct = c.array_gain ? std::sqrt(static_cast<double>(c.N_UT) * n_bs) : 1.0;
  const double g_bris = up ? ag.GR : ag.GT;
  // downlink: conj(ut)^T a_ut and a_bs^H bs; uplink: bs^H a_bs and a_ut^T ut
  auto bs_term = [&](double d) {
    const CVec a = steering(n_bs, d);
    return up ? dot_h(bs, a) : dot_h(a, bs);
  };
  auto ut_term = [&](double d) {
    const CVec a = steering(c.N_UT, d);
    if (!up) return dot_h(ut, a);
    cd acc = 0;
    for (int k = 0; k < c.N_UT; ++k) acc += a[k] * ut[k];
    return acc;
  };
  CVec out(c.M);
  auto add = [&](cd coef, double tau) {
    if (coef == cd(0)) return;
    for (int m = 1; m <= c.M; ++m) out[m - 1] += coef * ladder(tau, c.df, m);
  };
  if (include_direct)
    for (const PathRec& q : sc.bu) add(q.g * g_direct * ut_term(q.aoa) * bs_term(q.aod), q.tau);
  std::vector<cd> bsf(sc.br.size());
  std::vector<CVec> ris_bs(sc.br.size());
  for (std::size_t u = 0; u < sc.br.size(); ++u) {
    bsf[u] = bs_term(sc.br[u].aod);
    ris_bs[u] = steering(c.N_RIS, sc.br[u].aoa);
  }
  for (const PathRec& r : sc.ru) {
    const cd utf = ut_term(r.aoa);
    const CVec ris_ut = steering(c.N_RIS, r.aod);
    for (std::size_t u = 0; u < sc.br.size(); ++u) {
      cd refl = 0;
      for (int k = 0; k < c.N_RIS; ++k) refl += ris_ut[k] * rv[k] * ris_bs[u][k];
      add(r.g * sc.br[u].g * ag.Ht * g_bris * utf * refl * bsf[u], r.tau + sc.br[u].tau);
    }
  }
  return out;
}

}  // namespace risisac
