// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace risisac {

using cd = std::complex<double>;
using CVec = std::vector<cd>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kC = 299792458.0;

enum class Errc {
  InvalidDimension,
  NoPeak,
  DegenerateInfinite,
  InvalidEllipse,
  WrappedDelay,
  AliasedDoppler,
  NoSignal,
  DegenerateTemplate,
  ConvergenceFailure,
  DetectionExhausted,
  DegenerateAnchors,
  PositioningFailure,
  GenerationError,
  ConfigError,
  IndexOutOfRange,
  InvalidCase,
  CoincidentPositions,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

enum class Exec { serial, parallel };

// Row-major dense complex matrix.
struct CMat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cd> data;

  CMat() = default;
  CMat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  cd& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const cd& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  cd* row(std::size_t r) { return data.data() + r * cols; }
  const cd* row(std::size_t r) const { return data.data() + r * cols; }
};

using Stack = std::vector<CMat>;

CMat matmul(const CMat& a, const CMat& b);
CMat transpose(const CMat& a);
double frobenius(const CMat& a);
double stack_energy(const Stack& s);
CVec column(const CMat& a, std::size_t c);
CVec row_vec(const CMat& a, std::size_t r);
cd dot_h(const CVec& a, const CVec& b);  // a^H b
double norm2(const CVec& a);

// Spatial directions are 2-periodic; map into [-1, 1).
double wrap_dir(double x);
// Circular distance between two spatial directions.
inline double dir_dist(double a, double b) {
  const double d = wrap_dir(a - b);
  return d < 0 ? -d : d;
}

// e^{j pi (k-1) theta} / sqrt(N)
CVec steering(int N, double theta);

// e^{j(N-1)psi/2} sin(N psi/2) / sin(psi/2), limit N at psi = 0 mod 2pi.
cd dirichlet(int N, double psi);

// alpha(N, x)^H alpha(N, y)
inline cd steer_inner(int N, double x, double y) { return dirichlet(N, kPi * (y - x)) / static_cast<double>(N); }

// [F_M]_{k,m} = e^{+j 2pi (k-1)(m-1)/M}
CMat dft_F(int M);
// [W_N]_{k,n} = e^{-j 2pi (k-1)(n-1)/N}
CMat dft_W(int N);

// In-place length-n transforms on contiguous data (unnormalized).
void fft_forward(cd* x, int n);   // W_n x
void fft_backward(cd* x, int n);  // F_n x

CMat to_angle_delay(const CMat& Y);         // Y F_M
CMat to_doppler_delay(const CMat& Ytilde);  // W^T Ytilde / sqrt(N)

void to_angle_delay(const Stack& Y, Stack& out, Exec ex = Exec::parallel);
void to_doppler_delay(const Stack& Yt, Stack& out, Exec ex = Exec::parallel);

// Two-bin off-grid estimate of theta from g = W_N alpha(N, theta).
double offgrid_estimate(const CVec& g);

// Same estimator, for data in the F (inverse) domain: F_N alpha(N, theta).
inline double offgrid_estimate_idft(const CVec& g) {
  return wrap_dir(-offgrid_estimate(g));
}

}  // namespace risisac
