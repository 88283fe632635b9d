// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
#pragma once

#include <vector>

#include "risisac/core.hpp"
#include "risisac/scene.hpp"

namespace risisac {

struct Codebooks {
  std::vector<CVec> B;  // N_T codewords
  std::vector<CVec> R;  // N_RIS codewords, norm sqrt(N_RIS)
  std::vector<CVec> U;  // N_UT codewords
};

Codebooks build_codebooks(int N_T, int N_RIS, int N_UT);

// Spatial direction of codeword i (0-based) in a codebook of size N.
inline double codeword_dir(int i, int N) { return 2.0 * i / N; }

// Per-link array gain sqrt(N_a N_b) (all 1 when cfg.array_gain is off).
struct ArrayGains {
  double GT = 1, GR = 1, Hc = 1, Ht = 1, Hr = 1;
};
ArrayGains array_gains(const SceneConfig& cfg);

struct ChannelSet {
  CMat G_T;  // N_RIS x N_T
  CMat G_R;  // N_R x N_RIS
  CMat H_c;  // N_UT x N_T
  CMat H_t;  // N_UT x N_RIS
  CMat H_r;  // N_R x N_T
};

// Dense evaluation at subcarrier m and symbol p (both 1-based).
ChannelSet channels_at(const Scene& sc, int m, int p);

enum class Link { downlink, uplink };

// Per-subcarrier scalar through the BS-UT direct paths and the RIS cascade, from factored path terms.
// downlink: ut^H (H_c + H_t diag(rv) G_T) bs, with bs of size N_T.
// uplink:   bs^H (H_c' + G_R diag(rv) H_t^T) ut, with bs of size N_R (H_c' is the reciprocal direct channel).
CVec link_response(const Scene& sc, Link dir, const CVec& bs, const CVec& rv, const CVec& ut,
                   bool include_direct = true);

}  // namespace risisac
