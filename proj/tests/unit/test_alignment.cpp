#include <cmath>

#include "doctest.h"
#include "risisac/airlink.hpp"
#include "risisac/alignment.hpp"
#include "risisac/paoe.hpp"
#include "risisac/rng.hpp"
#include "risisac/sbtts.hpp"

using namespace risisac;

namespace {

Scene los_single(std::uint64_t seed) {
  SceneConfig c;
  c.seed = seed;
  c.noiseless = true;
  c.L_BR = 1;
  c.L_RU = 1;
  c.L_BU = 1;
  c.T = 0;
  return synthesize_scene(c);
}

// Oracle: sine of the signed angle from the array normal to the link direction.
double sine_oracle(Vec2 from, Vec2 q, Vec2 to) {
  const Vec2 l = unit(to - from);
  return std::sin(std::atan2(cross(l, q), dot(l, q)));
}

}  // namespace

TEST_CASE("RIS-UT angles") {
  RuAngles a = ru_angles({10, 10}, {0, -1}, {0, 0}, {0, 1});
  CHECK(a.theta == doctest::Approx(std::sqrt(0.5)));
  CHECK(a.phi == doctest::Approx(std::sqrt(0.5)));
  a = ru_angles({0, 10}, {0, -1}, {0, 0}, {0, 1});
  CHECK(a.theta == doctest::Approx(0).scale(1));
  CHECK(a.phi == doctest::Approx(0).scale(1));
  const RuAngles sw = ru_angles({0, 0}, {0, -1}, {10, 10}, {0, 1});
  CHECK(sw.theta == doctest::Approx(-std::sqrt(0.5)));
  CHECK(sw.phi == doctest::Approx(-std::sqrt(0.5)));
  CHECK_THROWS_AS(ru_angles({1, 2}, {0, 1}, {1, 2}, {0, 1}), Error);

  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const Vec2 pr{uniform(rng, -50, 50), uniform(rng, 5, 60)};
    const Vec2 pu{uniform(rng, -80, 80), uniform(rng, 5, 150)};
    if (std::abs(unit(pr - pu).x) < 1e-6) continue;
    const double ar = uniform(rng, 0, 2 * kPi), au = uniform(rng, 0, 2 * kPi);
    const Vec2 qr{std::cos(ar), std::sin(ar)}, qu{std::cos(au), std::sin(au)};
    a = ru_angles(pr, qr, pu, qu);
    CHECK(std::abs(a.theta - sine_oracle(pr, qr, pu)) < 1e-9);
    CHECK(std::abs(a.phi - sine_oracle(pu, qu, pr)) < 1e-9);
  }
}

TEST_CASE("overhead table") {
  const long long want[] = {8194, 10240, 8192, 10240, 8194, 10240, 8192, 10240};
  for (int c = 1; c <= 8; ++c) CHECK(overhead_for_case(c, 64, 128, 16) == want[c - 1]);
  CHECK_THROWS_AS(overhead_for_case(0, 64, 128, 16), Error);
  CHECK_THROWS_AS(overhead_for_case(9, 64, 128, 16), Error);
}

TEST_CASE("ideal LoS alignment reaches the array bound") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Scene sc = los_single(seed);
    const SceneConfig& c = sc.cfg;
    const CVec f = steering(c.N_T, sc.br[0].aod);
    const CVec rv = ris_config(c.N_RIS, sc.br[0].aoa, sc.ru[0].aod);
    const CVec w = steering(c.N_UT, sc.ru[0].aoa);
    const double g = beamforming_gain(sc, f, rv, w);
    CHECK(std::abs(g / 4096 - 1) < 1e-3);

    // Global phases do not matter.
    CVec f2 = f, rv2 = rv, w2 = w;
    for (cd& x : f2) x *= std::polar(1.0, 0.7);
    for (cd& x : rv2) x *= std::polar(1.0, -1.3);
    for (cd& x : w2) x *= std::polar(1.0, 2.1);
    CHECK(std::abs(beamforming_gain(sc, f2, rv2, w2) - g) < 1e-9 * g);

    // Misaligned beams and every codebook triple stay below the aligned gain.
    const Codebooks cb = build_codebooks(c.N_T, c.N_RIS, c.N_UT);
    Rng rng(seed);
    for (int i = 0; i < 50; ++i) {
      const double gi = beamforming_gain(sc, steering(c.N_T, uniform(rng, -1, 1)),
                                         ris_config(c.N_RIS, uniform(rng, -1, 1), uniform(rng, -1, 1)),
                                         steering(c.N_UT, uniform(rng, -1, 1)));
      CHECK(gi < 4096);
    }
    const SweepResult sw = beam_sweep_baseline(sc, cb, 50, 1);
    CHECK(sw.gain <= g + 1e-9);
  }
}

TEST_CASE("beam sweep on an on-grid scene") {
  Scene sc;
  sc.cfg.noiseless = true;
  sc.cfg.T = 0;
  const SceneConfig& c = sc.cfg;
  PathRec br;
  br.g = 1e-3;
  br.tau = 1e-7;
  br.aod = 2.0 * 5 / c.N_T;
  br.aoa = 0.1;
  PathRec ru;
  ru.g = 2e-4;
  ru.tau = 2e-7;
  ru.aod = -0.1 - 2.0 * 7 / c.N_RIS;
  ru.aoa = 2.0 * 3 / c.N_UT;
  sc.br = {br};
  sc.ru = {ru};
  const Codebooks cb = build_codebooks(c.N_T, c.N_RIS, c.N_UT);
  const SweepResult r = beam_sweep_baseline(sc, cb, 30, 9);
  CHECK(r.n == 5);
  CHECK(r.s == 7);
  CHECK(r.t == 3);
  CHECK(std::abs(r.gain / 4096 - 1) < 1e-3);
  CHECK(r.evaluations == static_cast<long long>(c.N_T) * c.N_RIS * c.N_UT);

  const SweepResult rr = restricted_sweep(sc, cb, cb.B[5], 30, 9);
  CHECK(rr.n == -1);
  CHECK(rr.s == 7);
  CHECK(rr.t == 3);
  CHECK(rr.evaluations == static_cast<long long>(c.N_RIS) * c.N_UT);
}

TEST_CASE("sweep spectra match the dense link response") {
  SceneConfig c;
  c.N_T = 8;
  c.N_R = 4;
  c.N_RIS = 10;
  c.N_UT = 4;
  c.M = 6;
  c.df = 2.56e6;
  c.T = 0;
  c.noiseless = true;
  c.seed = 4;
  const Scene sc = synthesize_scene(c);
  const Codebooks cb = build_codebooks(c.N_T, c.N_RIS, c.N_UT);
  // Brute-force argmax of the largest DFT bin over all triples.
  double top = -1;
  int bn = 0, bs = 0, bt = 0;
  for (int n = 0; n < c.N_T; ++n)
    for (int s = 0; s < c.N_RIS; ++s)
      for (int t = 0; t < c.N_UT; ++t) {
        CVec y = link_response(sc, Link::downlink, cb.B[n], cb.R[s], cb.U[t], false);
        fft_backward(y.data(), c.M);
        double v = 0;
        for (const cd& x : y) v = std::max(v, std::abs(x));
        if (v > top * (1 + 1e-12)) {
          top = v;
          bn = n;
          bs = s;
          bt = t;
        }
      }
  const SweepResult r = beam_sweep_baseline(sc, cb, 0, 1, Exec::serial);
  CHECK(r.n == bn);
  CHECK(r.s == bs);
  CHECK(r.t == bt);
}

TEST_CASE("beam sweep with noise only") {
  SceneConfig c;
  c.seed = 6;
  const Scene sc = synthesize_scene(c);
  const Codebooks cb = build_codebooks(c.N_T, c.N_RIS, c.N_UT);
  const SweepResult a = beam_sweep_baseline(sc, cb, -std::numeric_limits<double>::infinity(), 5);
  CHECK(a.gain < 4096 / 4.0);
  const SweepResult b = beam_sweep_baseline(sc, cb, 30, 5, Exec::serial);
  const SweepResult p = beam_sweep_baseline(sc, cb, 30, 5, Exec::parallel);
  CHECK(b.n == p.n);
  CHECK(b.s == p.s);
  CHECK(b.t == p.t);
  CHECK(b.gain == p.gain);
}

TEST_CASE("LoS ambiguity resolution") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    SceneConfig c;
    c.seed = seed;
    c.noiseless = true;
    const Scene sc = synthesize_scene(c);
    const PathRec& br = sc.br[0];
    const auto cand = estimate_aoa_candidates(wrap_dir(2 * br.aoa));
    const int correct = dir_dist(cand[0], br.aoa) < dir_dist(cand[1], br.aoa) ? 1 : 2;
    const Vec2 p_ris = los_pose(br.length, br.aod, br.aoa).p;
    std::array<double, 2> th{};
    for (int i = 0; i < 2; ++i) th[i] = ru_angles(p_ris, los_pose(br.length, br.aod, cand[i]).q, sc.ut.p, sc.ut.q).theta;
    const double phi_ru = ru_angles(sc.ris.p, sc.ris.q, sc.ut.p, sc.ut.q).phi;
    // Probe with the direct BS-UT path cancelled.
    const UplinkProbe probe = [&](const CVec& rv) {
      return link_response(sc, Link::uplink, steering(c.N_R, br.aod), rv, steering(c.N_UT, phi_ru), false);
    };
    CHECK(resolve_los_ambiguity(cand, th, c.N_RIS, probe) == correct);
    CHECK(resolve_los_ambiguity({cand[1], cand[0]}, {th[1], th[0]}, c.N_RIS, probe) == 3 - correct);
  }
  const UplinkProbe same = [](const CVec&) { return CVec(4, cd(1, 1)); };
  CHECK(resolve_los_ambiguity({0.1, -0.9}, {0.2, 0.3}, 16, same) == 1);
  CHECK_THROWS_AS(resolve_los_ambiguity({0.1, -0.9}, {0.2, 0.3}, 16, UplinkProbe{}), Error);
}

TEST_CASE("predicted direct uplink") {
  SceneConfig c;
  c.seed = 7;
  c.noiseless = true;
  const Scene sc = synthesize_scene(c);
  const CVec bs = steering(c.N_R, 0.31), ut = steering(c.N_UT, -0.2), rv = ris_config(c.N_RIS, 0.1, 0.4);
  const CVec full = link_response(sc, Link::uplink, bs, rv, ut, true);
  const CVec casc = link_response(sc, Link::uplink, bs, rv, ut, false);
  std::vector<UtPathEstimate> exact;
  for (const PathRec& q : sc.bu) {
    UtPathEstimate e;
    e.aod = q.aod;
    e.aoa = q.aoa;
    e.tau = q.tau;
    e.beta = q.g * std::sqrt(static_cast<double>(c.N_UT) * c.N_T);
    exact.push_back(e);
  }
  const double scale = std::sqrt(static_cast<double>(c.N_R) / c.N_T);
  CVec d = predicted_direct_uplink(exact, bs, ut, scale, c.M, c.df);
  double err = 0, ref = 0;
  for (int m = 0; m < c.M; ++m) {
    err = std::max(err, std::abs(full[m] - casc[m] - d[m]));
    ref = std::max(ref, std::abs(full[m] - casc[m]));
  }
  CHECK(err < 1e-12 * ref);

  // From UT training on the noiseless stacks at 0 dBm, with beams aligned to the LoS path.
  const Codebooks cb = build_codebooks(c.N_T, c.N_RIS, c.N_UT);
  const Stack Z = simulate_ut_stacks(sc, cb, 0, 1);
  Rng rng(1);
  const UtProbe zp = [&](int n, int t, int k) {
    return probe_symbol(sc, Link::downlink, cb.B[n], cb.R[k], cb.U[t], 0, rng);
  };
  const UtTrainingResult tr = run_ut_training(Z, zp, static_cast<int>(sc.bu.size()), 0.5, est_params(c));
  const PathRec& los = sc.bu[0];
  const CVec bl = steering(c.N_R, los.aod), ul = steering(c.N_UT, los.aoa);
  const CVec want = link_response(sc, Link::uplink, bl, rv, ul, true);
  const CVec cas = link_response(sc, Link::uplink, bl, rv, ul, false);
  d = predicted_direct_uplink(tr.paths, bl, ul, scale / std::sqrt(dbm_to_watt(0)), c.M, c.df);
  err = ref = 0;
  for (int m = 0; m < c.M; ++m) {
    err = std::max(err, std::abs(want[m] - cas[m] - d[m]));
    ref = std::max(ref, std::abs(want[m] - cas[m]));
  }
  CHECK(err < 0.02 * ref);
}
