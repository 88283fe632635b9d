// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#include "risisac/core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace risisac {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidDimension: return "invalid-dimension";
    case Errc::NoPeak: return "no-peak";
    case Errc::DegenerateInfinite: return "degenerate-infinite";
    case Errc::InvalidEllipse: return "invalid-ellipse";
    case Errc::WrappedDelay: return "wrapped-delay";
    case Errc::AliasedDoppler: return "aliased-doppler";
    case Errc::NoSignal: return "no-signal";
    case Errc::DegenerateTemplate: return "degenerate-template";
    case Errc::ConvergenceFailure: return "convergence-failure";
    case Errc::DetectionExhausted: return "detection-exhausted";
    case Errc::DegenerateAnchors: return "degenerate-anchors";
    case Errc::PositioningFailure: return "positioning-failure";
    case Errc::GenerationError: return "generation-error";
    case Errc::ConfigError: return "config-error";
    case Errc::IndexOutOfRange: return "index-out-of-range";
    case Errc::InvalidCase: return "invalid-case";
    case Errc::CoincidentPositions: return "coincident-positions";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

CMat matmul(const CMat& a, const CMat& b) {
  if (a.cols != b.rows) throw Error(Errc::InvalidDimension, "matmul shape mismatch");
  CMat c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const cd aik = a(i, k);
      const cd* br = b.row(k);
      cd* cr = c.row(i);
      for (std::size_t j = 0; j < b.cols; ++j) cr[j] += aik * br[j];
    }
  return c;
}

CMat transpose(const CMat& a) {
  CMat t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

double frobenius(const CMat& a) {
  double s = 0;
  for (const cd& v : a.data) s += std::norm(v);
  return std::sqrt(s);
}

double stack_energy(const Stack& s) {
  double e = 0;
  for (const CMat& m : s)
    for (const cd& v : m.data) e += std::norm(v);
  return e;
}

CVec column(const CMat& a, std::size_t c) {
  CVec v(a.rows);
  for (std::size_t r = 0; r < a.rows; ++r) v[r] = a(r, c);
  return v;
}

CVec row_vec(const CMat& a, std::size_t r) { return CVec(a.row(r), a.row(r) + a.cols); }

cd dot_h(const CVec& a, const CVec& b) {
  cd s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm2(const CVec& a) {
  double s = 0;
  for (const cd& v : a) s += std::norm(v);
  return std::sqrt(s);
}

double wrap_dir(double x) { return x - 2.0 * std::floor((x + 1.0) / 2.0); }

CVec steering(int N, double theta) {
  if (N < 1) throw Error(Errc::InvalidDimension, "steering length must be >= 1");
  CVec v(N);
  const double s = 1.0 / std::sqrt(static_cast<double>(N));
  for (int k = 0; k < N; ++k) v[k] = std::polar(s, kPi * k * theta);
  return v;
}

cd dirichlet(int N, double psi) {
  const double half = 0.5 * psi;
  const double den = std::sin(half);
  if (std::abs(den) < 1e-12) return cd(N, 0.0);
  return std::polar(1.0, 0.5 * (N - 1) * psi) * (std::sin(N * half) / den);
}

CMat dft_F(int M) {
  CMat f(M, M);
  for (int k = 0; k < M; ++k)
    for (int m = 0; m < M; ++m)
      f(k, m) = std::polar(1.0, 2 * kPi * static_cast<double>((static_cast<long long>(k) * m) % M) / M);
  return f;
}

CMat dft_W(int N) {
  CMat w(N, N);
  for (int k = 0; k < N; ++k)
    for (int n = 0; n < N; ++n)
      w(k, n) = std::polar(1.0, -2 * kPi * static_cast<double>((static_cast<long long>(k) * n) % N) / N);
  return w;
}

namespace {

std::mutex g_plan_mu;

fftw_plan get_plan(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lk(g_plan_mu);
  auto it = cache.find({n, sign});
  if (it != cache.end()) return it->second;
  std::vector<cd> buf(n);
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(std::make_pair(n, sign), plan);
  return plan;
}

void run(cd* x, int n, int sign) {
  if (n < 1) throw Error(Errc::InvalidDimension, "fft length must be >= 1");
  auto* p = reinterpret_cast<fftw_complex*>(x);
  fftw_execute_dft(get_plan(n, sign), p, p);
}

}  // namespace

void fft_forward(cd* x, int n) { run(x, n, FFTW_FORWARD); }
void fft_backward(cd* x, int n) { run(x, n, FFTW_BACKWARD); }

CMat to_angle_delay(const CMat& Y) {
  if (Y.cols < 1) throw Error(Errc::InvalidDimension, "empty matrix");
  CMat out = Y;
  for (std::size_t r = 0; r < out.rows; ++r) fft_backward(out.row(r), static_cast<int>(out.cols));
  return out;
}

CMat to_doppler_delay(const CMat& Yt) {
  if (Yt.rows < 1) throw Error(Errc::InvalidDimension, "empty matrix");
  const int N = static_cast<int>(Yt.rows);
  const double s = 1.0 / std::sqrt(static_cast<double>(N));
  CMat out(Yt.rows, Yt.cols);
  CVec col(N);
  for (std::size_t c = 0; c < Yt.cols; ++c) {
    for (int r = 0; r < N; ++r) col[r] = Yt(r, c);
    fft_forward(col.data(), N);
    for (int r = 0; r < N; ++r) out(r, c) = col[r] * s;
  }
  return out;
}

void to_angle_delay(const Stack& Y, Stack& out, Exec ex) {
  out.resize(Y.size());
  const long n = static_cast<long>(Y.size());
#pragma omp parallel for schedule(static) if (ex == Exec::parallel)
  for (long i = 0; i < n; ++i) out[i] = to_angle_delay(Y[i]);
}

void to_doppler_delay(const Stack& Yt, Stack& out, Exec ex) {
  out.resize(Yt.size());
  const long n = static_cast<long>(Yt.size());
#pragma omp parallel for schedule(static) if (ex == Exec::parallel)
  for (long i = 0; i < n; ++i) out[i] = to_doppler_delay(Yt[i]);
}

double offgrid_estimate(const CVec& g) {
  const int N = static_cast<int>(g.size());
  if (N < 2) throw Error(Errc::InvalidDimension, "off-grid estimate needs N >= 2");
  int best = 0;
  double bmag = -1;
  for (int i = 0; i < N; ++i) {
    const double a = std::abs(g[i]);
    if (a > bmag) {
      bmag = a;
      best = i;
    }
  }
  if (!(bmag > 0)) throw Error(Errc::NoPeak, "all-zero input");
  const int left = (best - 1 + N) % N;
  const int right = (best + 1) % N;
  const double al = std::abs(g[left]);
  const double ar = std::abs(g[right]);
  // 1-based bin indices; the neighbor may be virtual (0 or N+1) across the wrap
  const double gs = best + 1;
  double gn;
  double an;
  if (ar >= al) {
    gn = best + 2;
    an = ar;
  } else {
    gn = best;
    an = al;
  }
  const double p0 = bmag * bmag;
  const double p1 = an * an;
  const double sgn = gn > gs ? 1.0 : -1.0;
  const double G = sgn * (p0 - p1) / (p0 + p1);
  const double d = kPi / N;
  const double sd = std::sin(d), cdl = std::cos(d);
  double v = (G * sd - G * std::sqrt(std::max(0.0, 1 - G * G)) * sd * cdl) /
             (sd * sd + G * G * cdl * cdl);
  v = std::clamp(v, -1.0, 1.0);
  const double lit = -1.0 + (gn + gs) / N - std::asin(v) / kPi;
  return wrap_dir(lit + 1.0 - 2.0 / N);
}

}  // namespace risisac
