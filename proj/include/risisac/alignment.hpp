// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "risisac/channel.hpp"
#include "risisac/geometry.hpp"
#include "risisac/sbtts.hpp"

namespace risisac {

struct RuAngles {
  double theta = 0;  // AoD at the RIS
  double phi = 0;    // AoA at the UT
};

// RIS-UT link directions from poses. Throws CoincidentPositions if p_ris == p_ut.
RuAngles ru_angles(Vec2 p_ris, Vec2 q_ris, Vec2 p_ut, Vec2 q_ut);

// RIS phases sqrt(N) alpha(N, -phi_br - theta_ru): reflects the BS-RIS arrival phi_br toward theta_ru.
CVec ris_config(int N_RIS, double phi_br, double theta_ru);

// Uplink reception (one value per subcarrier) for a given RIS configuration.
using UplinkProbe = std::function<CVec(const CVec& ris_phases)>;

// Probes both candidate configurations and returns 1 if mean|y1| >= mean|y2|, else 2.
int resolve_los_ambiguity(const std::array<double, 2>& phi_br, const std::array<double, 2>& theta_ru, int N_RIS,
                          const UplinkProbe& probe);

// Uplink reception of already fitted BS-UT paths for BS combiner bs (N_R) and UT beam ut. scale maps the
// downlink amplitude beta to the uplink one (sqrt(N_R / N_T) with array gains, else 1).
CVec predicted_direct_uplink(const std::vector<UtPathEstimate>& paths, const CVec& bs, const CVec& ut, double scale,
                             int M, double df);

// Training symbols per case. Throws InvalidCase outside 1..8.
long long overhead_for_case(int case_id, int N_T, int N_RIS, int N_UT);

// max over w of |sum_m e^{j(m-1)w} y_m| for the RIS cascade y_m, divided by |g_BR| |g_RU| M of the strongest
// paths. With array gains off the result is scaled by sqrt(N_T N_UT) N_RIS so both models share one bound.
double beamforming_gain(const Scene& sc, const CVec& f, const CVec& rv, const CVec& w);

struct SweepResult {
  int n = -1;  // -1 when the BS beam was fixed
  int s = 0;
  int t = 0;
  double gain = 0;  // noiseless beamforming_gain of the pick
  long long evaluations = 0;
};

// Exhaustive codebook search over (B, R, U) using noisy M-bin subcarrier spectra at power p_dbm.
SweepResult beam_sweep_baseline(const Scene& sc, const Codebooks& cb, double p_dbm, std::uint64_t seed,
                                Exec ex = Exec::parallel);

// Same search over (R, U) with the BS beamformer fixed.
SweepResult restricted_sweep(const Scene& sc, const Codebooks& cb, const CVec& f, double p_dbm, std::uint64_t seed,
                             Exec ex = Exec::parallel);

}  // namespace risisac
