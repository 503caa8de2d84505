// Copyright 2026 The FedScalar Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include <benchmark/benchmark.h>

#include <vector>

#include "fedscalar/estimator_lab.hpp"
#include "fedscalar/harness.hpp"

namespace {

using namespace fedscalar;

ParamVector gaussian_vector(std::size_t d, std::uint64_t seed) {
  RngStream s(seed, "bench");
  ParamVector v(d);
  s.fill(Distribution::Gaussian, v.values());
  return v;
}

void BM_Inner(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const ParamVector a = gaussian_vector(d, 1);
  const ParamVector b = gaussian_vector(d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(inner(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Inner)->Arg(259)->Arg(1000)->Arg(100000);

void BM_SampleDirection(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  std::uint64_t round = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_direction(1, round++, Distribution::Rademacher, d));
  }
}
BENCHMARK(BM_SampleDirection)->Arg(259)->Arg(100000);

struct DigitsFixture {
  Dataset ds = load_digits(FEDSCALAR_DIGITS_CSV);
  MlpSpec spec{{64, 3, 3, 3, 10}};
  ParamVector params;
  std::vector<std::size_t> batch;

  DigitsFixture() {
    RngStream s(1, "init");
    params = init_params(spec, s);
    for (std::size_t i = 0; i < 10; ++i) batch.push_back(i);
  }
};

const DigitsFixture& digits() {
  static const DigitsFixture f;
  return f;
}

void BM_LossAndGrad(benchmark::State& state) {
  const auto& f = digits();
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_grad(f.spec, f.params, f.ds.samples, f.batch));
  }
}
BENCHMARK(BM_LossAndGrad);

void BM_LocalSgd(benchmark::State& state) {
  const auto& f = digits();
  std::vector<std::size_t> pool(80);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  std::uint64_t round = 0;
  for (auto _ : state) {
    RngStream s(1, "batch", round++);
    benchmark::DoNotOptimize(
        local_sgd(f.spec, f.params, f.ds.samples, pool, 5, 0.01, 10, s));
  }
}
BENCHMARK(BM_LocalSgd);

void BM_Round(benchmark::State& state) {
  const auto& f = digits();
  ExperimentConfig cfg;
  cfg.algorithm = state.range(0) == 0 ? Algorithm::FedScalar : Algorithm::FedAvg;
  cfg.eval_every = 1 << 30;
  RngStream ps(cfg.master_seed, "partition");
  const Partition part =
      partition(f.ds, cfg.num_clients, cfg.per_client, cfg.partition_scheme, ps);
  const Federation fed{cfg, f.spec, f.ds, part};
  ServerState s{1, f.params};
  for (auto _ : state) s = run_round(s, fed).next;
  state.SetLabel(state.range(0) == 0 ? "fedscalar" : "fedavg");
}
BENCHMARK(BM_Round)->Arg(0)->Arg(1);

void BM_UpdateMoments(benchmark::State& state) {
  std::vector<ParamVector> deltas;
  for (std::uint64_t i = 0; i < 3; ++i) deltas.push_back(gaussian_vector(8, i));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        lab::mc_update_moments(deltas, Distribution::Gaussian, 100000, 1));
  }
}
BENCHMARK(BM_UpdateMoments)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
