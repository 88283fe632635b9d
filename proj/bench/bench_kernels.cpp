// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risisac authors
//
// Serial reference vs OpenMP kernels. Arg 0 runs Exec::serial, arg 1 Exec::parallel.
#include <benchmark/benchmark.h>

#include "risisac/airlink.hpp"
#include "risisac/alignment.hpp"
#include "risisac/paoe.hpp"
#include "risisac/sbtts.hpp"

using namespace risisac;

namespace {

Exec mode(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

const Scene& case1() {
  static const Scene sc = [] {
    SceneConfig c;
    c.seed = 3;
    return synthesize_scene(c);
  }();
  return sc;
}

const Codebooks& books() {
  static const Codebooks cb = build_codebooks(64, 128, 16);
  return cb;
}

void BM_Transforms(benchmark::State& st) {
  const Stack Y = simulate_bs_stacks(case1(), books(), 50, 1);
  Stack Yt, Yb;
  for (auto _ : st) {
    to_angle_delay(Y, Yt, mode(st));
    to_doppler_delay(Yt, Yb, mode(st));
    benchmark::DoNotOptimize(Yb.data());
  }
}

void BM_BsStacks(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(simulate_bs_stacks(case1(), books(), 50, 1, mode(st)));
}

void BM_DomainMaxima(benchmark::State& st) {
  const Stack Y = simulate_bs_stacks(case1(), books(), 50, 1);
  for (auto _ : st) benchmark::DoNotOptimize(domain_maxima(Y, mode(st)));
}

void BM_Tdfs(benchmark::State& st) {
  SceneConfig c;
  c.case_id = 3;
  c.noiseless = true;
  const Scene sc = synthesize_scene(c);
  std::vector<TdfsPath> P;
  for (const PathRec& q : sc.br) {
    const auto a = estimate_aoa_candidates(wrap_dir(2 * q.aoa));
    P.push_back({q.aod, {a[0], a[1]}, q.length, std::norm(q.g)});
  }
  for (auto _ : st) benchmark::DoNotOptimize(tdfs(P, 100, 5, mode(st)));
}

void BM_BeamSweep(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(beam_sweep_baseline(case1(), books(), 50, 1, mode(st)));
}

}  // namespace

BENCHMARK(BM_Transforms)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BsStacks)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DomainMaxima)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Tdfs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BeamSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
