// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#pragma once

#include <array>
#include <functional>
#include <vector>

#include "risisac/core.hpp"
#include "risisac/scene.hpp"

namespace risisac {

struct EstParams {
  int N_T = 64, N_R = 16, N_RIS = 128, N_UT = 16, M = 128;
  double df = 120e3;
  double Ts = 1.07 / 120e3;
  double lambda = kC / 26.5e9;
};
EstParams est_params(const SceneConfig& cfg);

struct Peak {
  double value = 0;
  int n = 0, s = 0, m = 0;  // 0-based
};

struct DomainMaxima {
  Peak c;  // angle-delay
  Peak r;  // Doppler-delay
};

DomainMaxima domain_maxima(const Stack& Yt, const Stack& Yb);
DomainMaxima domain_maxima(const Stack& Y, Exec ex = Exec::parallel);

// Two one-way AoA candidates for a two-way sum vt in [-1, 1].
std::array<double, 2> estimate_aoa_candidates(double vt);

// Paper-convention delay-axis value from F-domain data: the raw two-bin output.
double delay_axis_psi(const CVec& g);

struct DelayRange {
  double tau = 0;  // s
  double r = 0;    // m
};
// Round-trip echoes (RIS and targets): tau = (1 + psi - 2/M)/(4 df), r = tau c. Throws WrappedDelay if tau < 0.
DelayRange estimate_delay_range(double psi, int M, double df);
// One-way BS-UT link: r = (1 + psi - 2/M) c / (2 df).
DelayRange estimate_oneway_range(double psi, int M, double df);

// Doppler column (W domain over the RIS sweep) -> radial velocity.
double estimate_doppler_velocity(const CVec& doppler_column, double Ts, double lambda);

// Three-beam least-squares AoD refinement around beam n_peak (0-based, cyclic neighbors).
// y holds the observations at beams n_peak-1, n_peak, n_peak+1. N_R = 0 drops the receive factor.
double estimate_aod_ls(const std::array<cd, 3>& y, int n_peak, int N_T, int N_R);

// Rank-1 model beam[n] * row[s] * col[m] over a stack.
struct Template {
  CVec beam;
  CVec row;
  CVec col;
};

// Fits beta = t^H y / t^H t over the whole stack and subtracts beta t. Throws DegenerateTemplate if t = 0.
cd remove_contribution(Stack& Y, const Template& t);

// Principal square root of beta / sqrt(M).
cd gain_from_beta(cd beta, int M);

struct RisPathEstimate {
  double aod = 0;
  std::array<double, 2> aoa_candidates{};
  double two_way = 0;  // vt
  double tau = 0;
  double range = 0;
  cd gain;
  Peak peak;
};

struct TargetEstimate {
  double theta = 0;
  double range = 0;
  double vel = 0;
  double doppler = 0;
  Peak peak;
};

struct SbttsResult {
  std::vector<RisPathEstimate> ris;
  std::vector<TargetEstimate> targets;
  std::vector<char> branches;  // 'c' or 'r' per iteration
  double residual_ratio = 1;   // final over initial stack energy
};

// Templates for one fitted component; the RIS form uses F alpha(vt) on the sweep axis.
Template ris_template(const EstParams& p, double aod, double vt, double tau);
Template target_template(const EstParams& p, double theta, double doppler, double tau);

SbttsResult run_ipebtts(Stack Y, int L_hat, int T_hat, const EstParams& p, Exec ex = Exec::parallel);
SbttsResult run_spebtts(const Stack& Y, int L_hat, int T_hat, const EstParams& p, Exec ex = Exec::parallel);

struct UtPathEstimate {
  double aod = 0;
  double aoa = 0;
  double tau = 0;
  double range = 0;
  bool direct = true;
  double rho = 1;
  cd beta;    // LS amplitude of the fitted template
  Peak peak;  // s holds the UT codeword index
};

// (beam n, UT codeword t, RIS codeword s) -> one received symbol per subcarrier.
using UtProbe = std::function<CVec(int n, int t, int s)>;

struct UtTrainingResult {
  std::vector<UtPathEstimate> paths;      // accepted BS-UT paths
  std::vector<UtPathEstimate> reflected;  // picks rejected by the rho test
  int probes = 0;
};

UtTrainingResult run_ut_training(Stack Z, const UtProbe& probe, int L_hat, double rho_threshold, const EstParams& p);

}  // namespace risisac
