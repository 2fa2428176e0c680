#include <benchmark/benchmark.h>

#include "rusgate/analysis.hpp"
#include "rusgate/gaussian.hpp"
#include "rusgate/protocol.hpp"

using namespace rusgate;

static void BM_MatrixExpCubic(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const Matrix x = quadrature_x(c).matrix();
  const Matrix gen = Complex(0.0, 0.03) * x * x * x;
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exp(gen));
}
BENCHMARK(BM_MatrixExpCubic)->Arg(20)->Arg(40)->Arg(80);

static void BM_DisplacementElements(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(displacement_elements(Complex(2.0, 1.0), c));
}
BENCHMARK(BM_DisplacementElements)->Arg(40)->Arg(120);

static void BM_CoupleResource(benchmark::State& state) {
  const auto d = gamma_factors(0.03, 1);
  const FockState psi = coherent(0.3, 40);
  for (auto _ : state) benchmark::DoNotOptimize(couple_resource(psi, 2.0, d.gamma_l[0], 80));
}
BENCHMARK(BM_CoupleResource);

static void BM_AttemptKraus(benchmark::State& state) {
  const auto d = gamma_factors(0.03, 1);
  const FockState joint = couple_resource(coherent(0.3, 40), 2.0, d.gamma_l[0], 80);
  const DetectorModel det{0.9, 100.0, 1e-10};
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(subtraction_attempt_kraus(joint, 1, 0.99, det, rng));
}
BENCHMARK(BM_AttemptKraus);

static void BM_AttemptBeamsplitter(benchmark::State& state) {
  const auto d = gamma_factors(0.03, 1);
  const FockState joint = couple_resource(coherent(0.3, 20), 0.2, d.gamma_l[0], 25);
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(subtraction_attempt(joint, 1, 0.99, DetectorModel::ideal(), rng));
  }
}
BENCHMARK(BM_AttemptBeamsplitter);

static void BM_FullGateHeralded(benchmark::State& state) {
  ProtocolConfig cfg;
  cfg.N = static_cast<int>(state.range(0));
  cfg.sampling = Sampling::heralded;
  const FockState psi = coherent(0.3, cfg.system_cutoff);
  Rng rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(full_gate(psi, cfg, rng));
}
BENCHMARK(BM_FullGateHeralded)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_VarianceSweep(benchmark::State& state) {
  MomentSweepSpec s;
  s.re_alpha = {0.0, 0.5, 1.0, 1.5};
  for (auto _ : state) benchmark::DoNotOptimize(variance_sweep(s));
}
BENCHMARK(BM_VarianceSweep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
