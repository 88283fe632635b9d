// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#include "risisac/sbtts.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "risisac/channel.hpp"

namespace risisac {

EstParams est_params(const SceneConfig& c) {
  EstParams p;
  p.N_T = c.N_T;
  p.N_R = c.N_R;
  p.N_RIS = c.N_RIS;
  p.N_UT = c.N_UT;
  p.M = c.M;
  p.df = c.df;
  p.Ts = c.Ts_s();
  p.lambda = c.lambda();
  return p;
}

namespace {

Peak stack_max(const Stack& S) {
  Peak pk;
  for (int n = 0; n < static_cast<int>(S.size()); ++n) {
    const CMat& A = S[n];
    for (int s = 0; s < static_cast<int>(A.rows); ++s)
      for (int m = 0; m < static_cast<int>(A.cols); ++m) {
        const double v = std::abs(A(s, m));
        if (v > pk.value) pk = {v, n, s, m};
      }
  }
  return pk;
}

int wrap_idx(int i, int n) { return ((i % n) + n) % n; }

std::array<cd, 3> three_beams(const Stack& S, const Peak& pk) {
  const int N = static_cast<int>(S.size());
  std::array<cd, 3> y;
  for (int i = 0; i < 3; ++i) y[i] = S[wrap_idx(pk.n + i - 1, N)](pk.s, pk.m);
  return y;
}

CVec delay_col(const EstParams& p, double phase_per_bin) {
  CVec c(p.M);
  for (int m = 0; m < p.M; ++m) c[m] = std::polar(1.0, -kPi * m * phase_per_bin);
  return c;
}

CVec beam_factor(const EstParams& p, double theta) {
  CVec b(p.N_T);
  for (int n = 0; n < p.N_T; ++n) {
    const double cn = 2.0 * n / p.N_T;
    b[n] = steer_inner(p.N_R, cn, theta) * steer_inner(p.N_T, theta, cn);
  }
  return b;
}

struct Transformed {
  Stack t, b;
};

void transform(const Stack& Y, Transformed& T, Exec ex) {
  to_angle_delay(Y, T.t, ex);
  to_doppler_delay(T.t, T.b, ex);
}

RisPathEstimate estimate_ris(const Stack& Yt, const Peak& pk, const EstParams& p) {
  RisPathEstimate e;
  e.peak = pk;
  const CMat& A = Yt[pk.n];
  e.two_way = offgrid_estimate_idft(column(A, pk.m));
  e.aoa_candidates = estimate_aoa_candidates(e.two_way);
  const DelayRange dr = estimate_delay_range(delay_axis_psi(row_vec(A, pk.s)), p.M, p.df);
  e.tau = dr.tau;
  e.range = dr.r;
  e.aod = estimate_aod_ls(three_beams(Yt, pk), pk.n, p.N_T, p.N_R);
  return e;
}

TargetEstimate estimate_target(const Stack& Yb, const Peak& pk, const EstParams& p) {
  TargetEstimate e;
  e.peak = pk;
  const CMat& A = Yb[pk.n];
  e.vel = estimate_doppler_velocity(column(A, pk.m), p.Ts, p.lambda);
  e.doppler = 2 * e.vel / p.lambda;
  e.range = estimate_delay_range(delay_axis_psi(row_vec(A, pk.s)), p.M, p.df).r;
  std::array<cd, 3> y = three_beams(Yb, pk);
  for (int i = 0; i < 3; ++i) {
    const int n = wrap_idx(pk.n + i - 1, p.N_T);
    y[i] *= std::polar(1.0, -2 * kPi * static_cast<double>(n) * p.N_RIS * e.doppler * p.Ts);
  }
  e.theta = estimate_aod_ls(y, pk.n, p.N_T, p.N_R);
  return e;
}

}  // namespace

DomainMaxima domain_maxima(const Stack& Yt, const Stack& Yb) { return {stack_max(Yt), stack_max(Yb)}; }

DomainMaxima domain_maxima(const Stack& Y, Exec ex) {
  Transformed T;
  transform(Y, T, ex);
  return domain_maxima(T.t, T.b);
}

std::array<double, 2> estimate_aoa_candidates(double vt) {
  if (vt <= 0) return {vt / 2 + 1, vt / 2};
  return {vt / 2 - 1, vt / 2};
}

double delay_axis_psi(const CVec& g) {
  const double N = static_cast<double>(g.size());
  return wrap_dir(offgrid_estimate(g) - 1 + 2 / N);
}

DelayRange estimate_delay_range(double psi, int M, double df) {
  const double tau = (1 + psi - 2.0 / M) / (4 * df);
  if (tau < 0) throw Error(Errc::WrappedDelay, "delay estimate wrapped below zero");
  return {tau, tau * kC};
}

DelayRange estimate_oneway_range(double psi, int M, double df) {
  const double tau = (1 + psi - 2.0 / M) / (2 * df);
  if (tau < 0) throw Error(Errc::WrappedDelay, "delay estimate wrapped below zero");
  return {tau, tau * kC};
}

double estimate_doppler_velocity(const CVec& col, double Ts, double lambda) {
  const double v = offgrid_estimate(col);
  if (std::abs(v) >= 1) throw Error(Errc::AliasedDoppler, "Doppler estimate at the aliasing limit");
  const double f = v / (2 * Ts);
  return f * lambda / 2;
}

double estimate_aod_ls(const std::array<cd, 3>& y, int n_peak, int N_T, int N_R) {
  if (std::abs(y[0]) == 0 && std::abs(y[1]) == 0 && std::abs(y[2]) == 0)
    throw Error(Errc::NoSignal, "all-zero observations");
  double c[3];
  for (int i = 0; i < 3; ++i) c[i] = 2.0 * wrap_idx(n_peak + i - 1, N_T) / N_T;
  const double c0 = 2.0 * n_peak / N_T;
  auto obj = [&](double th) {
    cd num = 0;
    double den = 0;
    for (int i = 0; i < 3; ++i) {
      cd m = steer_inner(N_T, th, c[i]);
      if (N_R > 0) m *= steer_inner(N_R, c[i], th);
      num += std::conj(y[i]) * m;
      den += std::norm(m);
    }
    return den > 0 ? std::abs(num) / std::sqrt(den) : 0.0;
  };
  const double lo = c0 - 1.0 / N_T, hi = c0 + 1.0 / N_T;
  constexpr int kGrid = 512;
  const double step = (hi - lo) / (kGrid - 1);
  int best = 0;
  double bv = -1;
  for (int i = 0; i < kGrid; ++i) {
    const double v = obj(lo + i * step);
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  double a = lo + std::max(best - 1, 0) * step, b = lo + std::min(best + 1, kGrid - 1) * step;
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = obj(x1), f2 = obj(x2);
  for (int it = 0; it < 20; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = obj(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = obj(x1);
    }
  }
  double th = 0.5 * (a + b);
  if (bv > std::max(f1, f2)) th = lo + best * step;
  return wrap_dir(th);
}

cd remove_contribution(Stack& Y, const Template& t) {
  const double tt = norm2(t.beam) * norm2(t.beam) * norm2(t.row) * norm2(t.row) * norm2(t.col) * norm2(t.col);
  if (!(tt > 0)) throw Error(Errc::DegenerateTemplate, "template has zero norm");
  cd ty = 0;
  for (std::size_t n = 0; n < Y.size(); ++n) {
    const CMat& A = Y[n];
    cd acc_n = 0;
    for (int s = 0; s < static_cast<int>(A.rows); ++s) {
      const cd* r = A.row(s);
      cd acc_s = 0;
      for (int m = 0; m < static_cast<int>(A.cols); ++m) acc_s += std::conj(t.col[m]) * r[m];
      acc_n += std::conj(t.row[s]) * acc_s;
    }
    ty += std::conj(t.beam[n]) * acc_n;
  }
  const cd beta = ty / tt;
  for (std::size_t n = 0; n < Y.size(); ++n) {
    CMat& A = Y[n];
    for (int s = 0; s < static_cast<int>(A.rows); ++s) {
      const cd k = beta * t.beam[n] * t.row[s];
      cd* r = A.row(s);
      for (int m = 0; m < static_cast<int>(A.cols); ++m) r[m] -= k * t.col[m];
    }
  }
  return beta;
}

cd gain_from_beta(cd beta, int M) { return std::sqrt(beta / std::sqrt(static_cast<double>(M))); }

Template ris_template(const EstParams& p, double aod, double vt, double tau) {
  Template t;
  t.beam = beam_factor(p, aod);
  t.row = steering(p.N_RIS, vt);
  fft_backward(t.row.data(), p.N_RIS);  // F alpha(vt)
  t.col = delay_col(p, 4 * tau * p.df);
  return t;
}

Template target_template(const EstParams& p, double theta, double doppler, double tau) {
  Template t;
  t.beam = beam_factor(p, theta);
  for (int n = 0; n < p.N_T; ++n)
    t.beam[n] *= std::polar(1.0, 2 * kPi * static_cast<double>(n) * p.N_RIS * doppler * p.Ts);
  t.row.resize(p.N_RIS);
  for (int s = 0; s < p.N_RIS; ++s) t.row[s] = std::polar(1.0, 2 * kPi * s * doppler * p.Ts);
  t.col = delay_col(p, 4 * tau * p.df);
  return t;
}

namespace {

// Argmax of f on [lo, hi] by golden section, never worse than f(start).
double golden_max(const std::function<double(double)>& f, double start, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi, c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 40; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  const double x = fc > fd ? c : d;
  return f(x) > f(start) ? x : start;
}

// C(n, s) = sum_m conj(col_m) Y[n](s, m)
CMat contract_delay(const Stack& Y, const CVec& col) {
  CMat C(Y.size(), Y.empty() ? 0 : Y[0].rows);
  for (std::size_t n = 0; n < Y.size(); ++n)
    for (std::size_t s = 0; s < Y[n].rows; ++s) {
      const cd* r = Y[n].row(s);
      cd acc = 0;
      for (std::size_t m = 0; m < Y[n].cols; ++m) acc += std::conj(col[m]) * r[m];
      C(n, s) = acc;
    }
  return C;
}

// D_m = sum_n sum_s conj(beam_n row_s) Y[n](s, m)
CVec contract_beam_row(const Stack& Y, const CVec& beam, const CVec& row) {
  CVec D(Y.empty() ? 0 : Y[0].cols);
  for (std::size_t n = 0; n < Y.size(); ++n)
    for (std::size_t s = 0; s < Y[n].rows; ++s) {
      const cd w = std::conj(beam[n] * row[s]);
      const cd* r = Y[n].row(s);
      for (std::size_t m = 0; m < D.size(); ++m) D[m] += w * r[m];
    }
  return D;
}

double fit_beam_row(const CMat& C, const CVec& beam, const CVec& row) {
  cd acc = 0;
  for (std::size_t n = 0; n < C.rows; ++n) {
    cd a = 0;
    for (std::size_t s = 0; s < C.cols; ++s) a += std::conj(row[s]) * C(n, s);
    acc += std::conj(beam[n]) * a;
  }
  const double nn = std::pow(norm2(beam) * norm2(row), 2);
  return nn > 0 ? std::norm(acc) / nn : 0;
}

double fit_col(const CVec& D, const CVec& col) {
  const double nn = std::pow(norm2(col), 2);
  return nn > 0 ? std::norm(dot_h(col, D)) / nn : 0;
}

// One fitted component: RIS x = {aod, vt, tau}, target x = {theta, doppler, range / c}.
struct Comp {
  bool ris = true;
  int slot = -1;  // index in the report, -1 when removed but not reported
  std::array<double, 3> x{};
  cd beta;
  Peak peak;
};

Template comp_template(const EstParams& p, const Comp& c) {
  return c.ris ? ris_template(p, c.x[0], c.x[1], c.x[2]) : target_template(p, c.x[0], c.x[1], c.x[2]);
}

using MakeTemplate = std::function<Template(const std::array<double, 3>&)>;

// Cyclic coordinate ascent of |t^H Y'|^2 / |t|^2 over the three template parameters (each within +-step),
// where Y' = Y + beta0 t0 puts a previous fit of the same component back. The fit is then moved from t0 to
// the new template in one pass over Y. All contractions use the rank-1 structure of t0.
void refit(Stack& Y, Comp& c, const EstParams& p, int sweeps, bool has_old) {
  const std::array<double, 3> step = c.ris ? std::array<double, 3>{1.0 / p.N_T, 2.0 / p.N_RIS, 1 / (2 * p.M * p.df)}
                                           : std::array<double, 3>{1.0 / p.N_T, 1 / (p.N_RIS * p.Ts),
                                                                   1 / (2 * p.M * p.df)};
  const bool ris = c.ris;
  const MakeTemplate make = [&](const std::array<double, 3>& x) {
    return ris ? ris_template(p, x[0], x[1], x[2]) : target_template(p, x[0], x[1], x[2]);
  };
  const Template t0 = has_old ? comp_template(p, c) : Template{};
  const cd beta0 = has_old ? c.beta : cd(0);
  std::array<double, 3> x = c.x;
  CVec D;
  Template t;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    const CVec col = make(x).col;
    CMat C = contract_delay(Y, col);
    if (has_old) {
      const cd k = beta0 * dot_h(col, t0.col);
      for (std::size_t n = 0; n < C.rows; ++n)
        for (std::size_t s = 0; s < C.cols; ++s) C(n, s) += k * t0.beam[n] * t0.row[s];
    }
    for (int k = 0; k < 2; ++k) {
      const auto f = [&](double v) {
        std::array<double, 3> y = x;
        y[k] = v;
        const Template tk = make(y);
        return fit_beam_row(C, tk.beam, tk.row);
      };
      x[k] = golden_max(f, x[k], x[k] - step[k], x[k] + step[k]);
    }
    t = make(x);
    D = contract_beam_row(Y, t.beam, t.row);
    if (has_old) {
      const cd k = beta0 * dot_h(t.beam, t0.beam) * dot_h(t.row, t0.row);
      for (std::size_t m = 0; m < D.size(); ++m) D[m] += k * t0.col[m];
    }
    const auto f = [&](double v) {
      std::array<double, 3> y = x;
      y[2] = v;
      return fit_col(D, make(y).col);
    };
    x[2] = golden_max(f, x[2], x[2] - step[2], x[2] + step[2]);
    t.col = make(x).col;
  }
  const double tt = std::pow(norm2(t.beam) * norm2(t.row) * norm2(t.col), 2);
  if (!(tt > 0)) throw Error(Errc::DegenerateTemplate, "template has zero energy");
  const cd beta = dot_h(t.col, D) / tt;
  for (std::size_t n = 0; n < Y.size(); ++n) {
    CMat& A = Y[n];
    for (std::size_t s = 0; s < A.rows; ++s) {
      const cd k1 = beta * t.beam[n] * t.row[s];
      cd* r = A.row(s);
      if (has_old) {
        const cd k0 = beta0 * t0.beam[n] * t0.row[s];
        for (std::size_t m = 0; m < A.cols; ++m) r[m] += k0 * t0.col[m] - k1 * t.col[m];
      } else {
        for (std::size_t m = 0; m < A.cols; ++m) r[m] -= k1 * t.col[m];
      }
    }
  }
  c.x = x;
  c.x[0] = wrap_dir(c.x[0]);
  if (ris) c.x[1] = wrap_dir(c.x[1]);
  c.beta = beta;
}

// Fits and removes c, then re-fits every earlier component once against the new residual.
void add_component(Stack& Y, std::vector<Comp>& comps, Comp c, const EstParams& p) {
  refit(Y, c, p, 3, false);
  comps.push_back(c);
  for (std::size_t i = 0; i + 1 < comps.size(); ++i) refit(Y, comps[i], p, 1, true);
}

Comp from_ris(const RisPathEstimate& e) { return {true, -1, {e.aod, e.two_way, e.tau}, {}, e.peak}; }
Comp from_target(const TargetEstimate& e) {
  return {false, -1, {e.theta, e.doppler, e.range / kC}, {}, e.peak};
}

void report(const std::vector<Comp>& comps, const EstParams& p, SbttsResult& res) {
  for (const Comp& c : comps) {
    if (c.slot < 0) continue;
    if (c.ris) {
      RisPathEstimate& e = res.ris[c.slot];
      e.aod = c.x[0];
      e.two_way = c.x[1];
      e.aoa_candidates = estimate_aoa_candidates(c.x[1]);
      e.tau = c.x[2];
      e.range = c.x[2] * kC;
      e.gain = gain_from_beta(c.beta, p.M);
      e.peak = c.peak;
    } else {
      TargetEstimate& e = res.targets[c.slot];
      e.theta = c.x[0];
      e.doppler = c.x[1];
      e.vel = c.x[1] * p.lambda / 2;
      e.range = c.x[2] * kC;
      e.peak = c.peak;
    }
  }
}

}  // namespace

SbttsResult run_ipebtts(Stack Y, int L_hat, int T_hat, const EstParams& p, Exec ex) {
  if (L_hat < 0 || T_hat < 0) throw Error(Errc::ConfigError, "path and target budgets must be >= 0");
  SbttsResult res;
  const double e0 = stack_energy(Y);
  const int cap = L_hat + T_hat + 5;
  Transformed T;
  std::vector<Comp> comps;
  int nr = 0, nt = 0, q = 0;
  while (nr < L_hat || nt < T_hat) {
    if (++q > cap) throw Error(Errc::ConvergenceFailure, "detection budget not met within the iteration cap");
    transform(Y, T, ex);
    const DomainMaxima dm = domain_maxima(T.t, T.b);
    if (!(dm.c.value > 0) && !(dm.r.value > 0)) throw Error(Errc::NoSignal, "stacks carry no signal");
    // A component whose budget is already spent is still removed, just not reported.
    Comp c;
    if (dm.c.value >= dm.r.value) {
      c = from_ris(estimate_ris(T.t, dm.c, p));
      if (nr < L_hat) c.slot = nr++;
      res.branches.push_back('c');
    } else {
      c = from_target(estimate_target(T.b, dm.r, p));
      if (nt < T_hat) c.slot = nt++;
      res.branches.push_back('r');
    }
    add_component(Y, comps, c, p);
  }
  res.ris.resize(nr);
  res.targets.resize(nt);
  report(comps, p, res);
  res.residual_ratio = e0 > 0 ? stack_energy(Y) / e0 : 0;
  return res;
}

SbttsResult run_spebtts(const Stack& Y, int L_hat, int T_hat, const EstParams& p, Exec ex) {
  if (L_hat < 0 || T_hat < 0) throw Error(Errc::ConfigError, "path and target budgets must be >= 0");
  SbttsResult res;
  Transformed T;
  std::vector<Comp> comps;
  Stack Yc = Y;
  for (int u = 0; u < L_hat; ++u) {
    transform(Yc, T, ex);
    Comp c = from_ris(estimate_ris(T.t, stack_max(T.t), p));
    c.slot = u;
    add_component(Yc, comps, c, p);
    res.branches.push_back('c');
  }
  std::vector<Comp> tcomps;
  Stack Yr = Y;
  for (int l = 0; l < T_hat; ++l) {
    transform(Yr, T, ex);
    Comp c = from_target(estimate_target(T.b, stack_max(T.b), p));
    c.slot = l;
    add_component(Yr, tcomps, c, p);
    res.branches.push_back('r');
  }
  comps.insert(comps.end(), tcomps.begin(), tcomps.end());
  res.ris.resize(L_hat);
  res.targets.resize(T_hat);
  report(comps, p, res);
  return res;
}

UtTrainingResult run_ut_training(Stack Z, const UtProbe& probe, int L_hat, double rho_threshold,
                                 const EstParams& p) {
  if (L_hat < 0) throw Error(Errc::ConfigError, "path budget must be >= 0");
  UtTrainingResult res;
  std::set<int> g_aod, g_aoa, g_delay;
  std::vector<std::pair<Template, cd>> fitted;
  Stack Zt;
  auto fitted_at = [&](int n, int t) {
    CVec out(p.M);
    for (const auto& [tp, beta] : fitted) {
      const cd k = beta * tp.beam[n] * tp.row[t];
      for (int m = 0; m < p.M; ++m) out[m] += k * tp.col[m];
    }
    return out;
  };
  auto mean_abs = [](const CVec& v) {
    double s = 0;
    for (const cd& x : v) s += std::abs(x);
    return v.empty() ? 0.0 : s / v.size();
  };
  for (int k = 0; k < L_hat; ++k) {
    to_angle_delay(Z, Zt, Exec::serial);
    Peak pk = stack_max(Zt);
    if (!(pk.value > 0)) throw Error(Errc::NoSignal, "UT stacks carry no signal");
    // Residual z at the picked symbol against the same beams with the RIS codeword shifted by two.
    CVec z0 = row_vec(Z[pk.n], pk.s);
    CVec z2 = probe(pk.n, pk.s, (pk.s + 2) % p.N_RIS);
    ++res.probes;
    const CVec model = fitted_at(pk.n, pk.s);
    for (int m = 0; m < p.M; ++m) z2[m] -= model[m];
    const double den = mean_abs(z0);
    const double rho = den > 0 ? mean_abs(z2) / den : 0.0;
    bool direct = rho > rho_threshold;
    if (!direct) {
      UtPathEstimate r;
      r.direct = false;
      r.rho = rho;
      r.peak = pk;
      res.reflected.push_back(r);
      for (int d = -1; d <= 1; ++d) {
        g_aod.insert(wrap_idx(pk.n + d, p.N_T));
        g_aoa.insert(wrap_idx(pk.s + d, p.N_UT));
        g_delay.insert(wrap_idx(pk.m + d, p.M));
      }
      Peak best;
      for (int n = 0; n < p.N_T; ++n) {
        if (g_aod.count(n)) continue;
        for (int t = 0; t < p.N_UT; ++t) {
          if (g_aoa.count(t)) continue;
          for (int m = 0; m < p.M; ++m) {
            if (g_delay.count(m)) continue;
            const double v = std::abs(Zt[n](t, m));
            if (v > best.value) best = {v, n, t, m};
          }
        }
      }
      if (!(best.value > 0)) throw Error(Errc::DetectionExhausted, "exclusion sets cover every candidate");
      pk = best;
    }
    UtPathEstimate e;
    e.peak = pk;
    e.rho = rho;
    e.direct = true;
    const CMat& A = Zt[pk.n];
    e.aoa = offgrid_estimate(column(A, pk.m));
    const DelayRange dr = estimate_oneway_range(delay_axis_psi(row_vec(A, pk.s)), p.M, p.df);
    e.tau = dr.tau;
    e.range = dr.r;
    e.aod = estimate_aod_ls(three_beams(Zt, pk), pk.n, p.N_T, 0);
    Template tp;
    tp.beam.resize(p.N_T);
    for (int n = 0; n < p.N_T; ++n) tp.beam[n] = steer_inner(p.N_T, e.aod, 2.0 * n / p.N_T);
    tp.row.resize(p.N_UT);
    for (int t = 0; t < p.N_UT; ++t) tp.row[t] = steer_inner(p.N_UT, 2.0 * t / p.N_UT, e.aoa);
    tp.col = delay_col(p, 2 * e.tau * p.df);
    const cd beta = remove_contribution(Z, tp);
    e.beta = beta;
    fitted.emplace_back(std::move(tp), beta);
    res.paths.push_back(e);
  }
  return res;
}

}  // namespace risisac
