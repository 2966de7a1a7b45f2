/*
 * Copyright 2026 The fpmimo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <random>

#include "fpmimo/fp_emu.hpp"
#include "fpmimo/harness.hpp"
#include "fpmimo/linalg.hpp"
#include "fpmimo/transceiver.hpp"

namespace {

using namespace fpmimo;

std::vector<double> uniform_values(std::size_t n) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> dist(-100.0, 100.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

void BM_RoundToFormat(benchmark::State& state) {
  const auto fmt = FloatFormat::fp16();
  const auto mode = state.range(0) ? RoundingMode::stochastic(7) : RoundingMode::nearest_even();
  const auto xs = uniform_values(4096);
  for (auto _ : state) {
    for (double x : xs) benchmark::DoNotOptimize(round_to_format(x, fmt, mode));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
  state.SetLabel(state.range(0) ? "stochastic" : "nearest");
}
BENCHMARK(BM_RoundToFormat)->Arg(0)->Arg(1);

void BM_ArithmeticMul(benchmark::State& state) {
  Arithmetic a(FloatFormat::fp16());
  const auto xs = uniform_values(4096);
  for (auto _ : state) {
    double acc = 1.0;
    for (double x : xs) acc = a.mul(acc, x * 1e-2 + 1.0);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_ArithmeticMul);

ChannelRealization channel(long M, long K) {
  Rng gen(3);
  return draw_channel(M, K, gen);
}

void BM_InnerProduct(benchmark::State& state, PrecisionPolicy policy) {
  const long n = state.range(0);
  const auto ch = channel(n, 2);
  const ComplexVector a = ch.H.col(0), b = ch.H.col(1);
  Precision prec(policy);
  for (auto _ : state) benchmark::DoNotOptimize(inner_product_fp(a, b, prec));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK_CAPTURE(BM_InnerProduct, fp16, PrecisionPolicy::uniform(FloatFormat::fp16()))
    ->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK_CAPTURE(BM_InnerProduct, mixed_fp16_fp32_b32,
                  PrecisionPolicy::mixed(FloatFormat::fp16(), FloatFormat::fp32(), 32))
    ->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK_CAPTURE(BM_InnerProduct, fp64, PrecisionPolicy::full())->RangeMultiplier(4)->Range(64, 4096);

void BM_Cholesky(benchmark::State& state) {
  const long K = state.range(0);
  const auto ch = channel(4 * K, K);
  const ComplexMatrix c = ch.H.adjoint() * ch.H;
  Precision prec(PrecisionPolicy::uniform(FloatFormat::fp32()));
  for (auto _ : state) benchmark::DoNotOptimize(cholesky_fp(c, prec));
}
BENCHMARK(BM_Cholesky)->Arg(4)->Arg(16)->Arg(64);

void BM_ZfDetect(benchmark::State& state, PrecisionPolicy policy) {
  const long M = state.range(0), K = 4;
  const auto ch = channel(M, K);
  const ComplexVector z = ch.H * ComplexVector::Ones(K);
  Precision prec(policy);
  for (auto _ : state) benchmark::DoNotOptimize(zf_detect_ne(ch.H, z, prec));
}
BENCHMARK_CAPTURE(BM_ZfDetect, fp16, PrecisionPolicy::uniform(FloatFormat::fp16()))
    ->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_ZfDetect, mixed_fp16_fp32_b32,
                  PrecisionPolicy::mixed(FloatFormat::fp16(), FloatFormat::fp32(), 32))
    ->Arg(64)->Arg(256)->Arg(1024);

void BM_Trial(benchmark::State& state, Scenario scenario, long K) {
  ExperimentConfig c;
  c.scenario = scenario;
  c.K = K;
  c.M_grid = {state.range(0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_trial(c, c.M_grid[0], 10.0, 0, state.iterations()));
  }
}
BENCHMARK_CAPTURE(BM_Trial, simo, Scenario::kSimo, 1L)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_Trial, mu_simo, Scenario::kMuSimo, 4L)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
