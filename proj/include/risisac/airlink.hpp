// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#pragma once

#include <cstdint>

#include "risisac/channel.hpp"
#include "risisac/rng.hpp"

namespace risisac {

struct ObservationStacks {
  Stack Y;  // N_T x (N_RIS x M), BS echoes
  Stack Z;  // N_T x (N_UT x M), UT receptions
  double sigma_r2 = 0;
  double sigma_c2 = 0;
};

// Noise per entry in W, or 0 when cfg.noiseless.
double noise_variance(const SceneConfig& cfg);

// Y[n](s, m): BS echo for transmit beam n, RIS codeword s, subcarrier m. Beam n draws its noise from
// its own substream of noise_seed, so serial and parallel runs agree bit for bit.
Stack simulate_bs_stacks(const Scene& sc, const Codebooks& cb, double p_dbm, std::uint64_t noise_seed,
                         Exec ex = Exec::parallel);

// Z[n](t, m): UT reception with UT combiner t and RIS codeword t.
Stack simulate_ut_stacks(const Scene& sc, const Codebooks& cb, double p_dbm, std::uint64_t noise_seed,
                         Exec ex = Exec::parallel);

ObservationStacks simulate_all(const Scene& sc, const Codebooks& cb, double p_dbm, std::uint64_t noise_seed,
                               Exec ex = Exec::parallel);

// One pilot symbol through link_response with power scaling and (unless noiseless) CN(0, sigma^2) per
// subcarrier drawn from rng.
CVec probe_symbol(const Scene& sc, Link dir, const CVec& bs, const CVec& rv, const CVec& ut, double p_dbm,
                  Rng& rng);

}  // namespace risisac
