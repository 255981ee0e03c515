#include <benchmark/benchmark.h>

#include <cmath>

#include "rvode/classify.hpp"
#include "rvode/decay_scale.hpp"
#include "rvode/numerics.hpp"
#include "rvode/ode.hpp"
#include "rvode/perturbation.hpp"
#include "rvode/rng.hpp"
#include "rvode/sde.hpp"

using namespace rvode;

namespace {
const auto cubic = NonlinearityModel::pure_power(1.0, 3.0);
}

static void BM_FInvClosedForm(benchmark::State& state) {
  DecayScale scale(cubic);
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scale.F_inv(t));
    t = t < 1e6 ? t * 1.001 : 1.0;
  }
}
BENCHMARK(BM_FInvClosedForm);

static void BM_FInvNumeric(benchmark::State& state) {
  DecayScale scale(NonlinearityModel::power_log_loglog(1.0, 3.0, 1.0, 0.0, 0.05));
  scale.ensure_coverage(1.1e6);
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scale.F_inv(t));
    t = t < 1e6 ? t * 1.001 : 1.0;
  }
}
BENCHMARK(BM_FInvNumeric);

static void BM_NormalDraw(benchmark::State& state) {
  NormalStream stream(42, 0);
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(stream.normal(k++));
}
BENCHMARK(BM_NormalDraw);

static void BM_EulerMaruyamaStep(benchmark::State& state) {
  const auto sigma = NoiseIntensity::power_decay(1.0, 2.5);
  const double steps = 1e4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_path(cubic, sigma, 1.0, steps * 1e-2, 1e-2, 7, 0));
  }
  state.SetItemsProcessed(static_cast<long>(steps) * state.iterations());
}
BENCHMARK(BM_EulerMaruyamaStep);

static void BM_UnperturbedDecade(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_ode(cubic, Perturbation::zero(), 1.0, 100.0));
}
BENCHMARK(BM_UnperturbedDecade);

static void BM_OscillatingTail(benchmark::State& state) {
  const auto g = Perturbation::oscillating(GammaSpec::one_plus_t(), 3);
  double t = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.tail_integral(t));
    t = t < 50.0 ? t + 0.37 : 2.0;
  }
}
BENCHMARK(BM_OscillatingTail);

static void BM_SpikedTail(benchmark::State& state) {
  const auto g = Perturbation::spiked(1.0, 2.0, GammaSpec::t(), 1e3);
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.tail_integral(t));
    t = t < 900.0 ? t * 1.1 : 1.0;
  }
}
BENCHMARK(BM_SpikedTail);

static void BM_Classify(benchmark::State& state) {
  std::vector<double> t, v;
  for (double s : log_spaced(1.0, 1e6, 64)) {
    t.push_back(s);
    v.push_back(1.0 + std::pow(s, -0.5));
  }
  for (auto _ : state) benchmark::DoNotOptimize(classify(t, v));
}
BENCHMARK(BM_Classify);

BENCHMARK_MAIN();
