#include <benchmark/benchmark.h>

#include "tpa/absorption.hpp"
#include "tpa/coherent.hpp"
#include "tpa/optimize.hpp"
#include "tpa/states.hpp"

namespace {

using namespace tpa;

const Atom kAtom = atom_from_ratio(0.5, 0.3, -0.2);

void BM_PfAtFast(benchmark::State& st) {
  const EntangledGaussian s{0.79, 1.38, 1.62};
  for (auto _ : st) benchmark::DoNotOptimize(pf_at(kAtom, s, 2.0, std::nullopt, PfOptions{}));
}
BENCHMARK(BM_PfAtFast)->Unit(benchmark::kMillisecond);

void BM_PfAtReference(benchmark::State& st) {
  const EntangledGaussian s{0.79, 1.38, 1.62};
  for (auto _ : st) benchmark::DoNotOptimize(pf_at(kAtom, s, 2.0, std::nullopt, reference_options()));
}
BENCHMARK(BM_PfAtReference)->Unit(benchmark::kMillisecond);

void BM_PeakOverTime(benchmark::State& st) {
  const GaussianProduct s{0.65, 1.65, 2.17};
  for (auto _ : st) benchmark::DoNotOptimize(pf_max_over_t(kAtom, s).p_max);
}
BENCHMARK(BM_PeakOverTime)->Unit(benchmark::kMillisecond);

void BM_CoherentEvolve(benchmark::State& st) {
  const CoherentDrive d{1.0, 1.0, 0.8, 1.6, 1.0};
  const TimeWindow w = coherent_window(kAtom, d, 400);
  for (auto _ : st) benchmark::DoNotOptimize(evolve(kAtom, d, w).states.back().ff);
}
BENCHMARK(BM_CoherentEvolve)->Unit(benchmark::kMillisecond);

void BM_SchmidtEntangled(benchmark::State& st) {
  const EntangledGaussian s{1.03, 10.82, 0.19};
  for (auto _ : st) benchmark::DoNotOptimize(schmidt_numeric(s).entropy_bits);
}
BENCHMARK(BM_SchmidtEntangled)->Unit(benchmark::kMillisecond);

void BM_SchmidtOptimal(benchmark::State& st) {
  const Atom a = atom_from_ratio(double(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(schmidt_numeric(OptimalState{a, 0.0, std::nullopt}).entropy_bits);
}
BENCHMARK(BM_SchmidtOptimal)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_OptimizeProduct(benchmark::State& st) {
  OptimizationProblem p;
  p.atom = atom_from_ratio(1.0);
  p.target = Target::gaussian_product;
  for (auto _ : st) benchmark::DoNotOptimize(optimize_pulse(p).p_max);
}
BENCHMARK(BM_OptimizeProduct)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
