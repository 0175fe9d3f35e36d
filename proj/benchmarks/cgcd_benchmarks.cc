// Copyright 2026 The Authors.
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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cgcd/clustering.h"
#include "cgcd/embedding.h"
#include "cgcd/evt.h"
#include "cgcd/losses.h"
#include "cgcd/metrics.h"
#include "cgcd/numerics/tape.h"

namespace cgcd {
namespace {

RowMatrix random_unit_rows(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  RowMatrix out(0, dim);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& x : v) x = g(rng);
    out.append_row(normalized(v));
  }
  return out;
}

void BM_AffinityPropagation(benchmark::State& state) {
  const RowMatrix z =
      random_unit_rows(static_cast<std::size_t>(state.range(0)), 16, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(affinity_propagation(z, ApConfig{}));
  }
}
BENCHMARK(BM_AffinityPropagation)->Arg(60)->Arg(240)->Unit(benchmark::kMillisecond);

void BM_FitWeibull(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::weibull_distribution<double> w(2.0, 0.5);
  std::vector<double> tail(static_cast<std::size_t>(state.range(0)));
  for (double& x : tail) x = w(rng);
  for (auto _ : state) benchmark::DoNotOptimize(fit_weibull(tail));
}
BENCHMARK(BM_FitWeibull)->Arg(500)->Arg(10000);

void BM_HungarianAccuracy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::vector<int> predicted(n);
  std::vector<int> truth(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = static_cast<int>(rng() % 13);
    predicted[i] = static_cast<int>(rng() % 16);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(hungarian_accuracy(predicted, truth));
  }
}
BENCHMARK(BM_HungarianAccuracy)->Arg(260)->Arg(5000);

void BM_PaLossGradient(benchmark::State& state) {
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  const EmbeddingModel model =
      EmbeddingModel::random({32, 64, 16}, Activation::kTanh, 4);
  const RowMatrix x = random_unit_rows(batch, 32, 5);
  ProxySet proxies;
  const RowMatrix p = random_unit_rows(10, 16, 6);
  for (std::size_t c = 0; c < 10; ++c) {
    proxies.proxies.push_back(
        Proxy{{p.row(c).begin(), p.row(c).end()}, static_cast<int>(c), 0});
  }
  proxies.class_count = 10;
  std::vector<int> labels(batch);
  for (std::size_t i = 0; i < batch; ++i) labels[i] = static_cast<int>(i % 10);
  std::vector<double> params = model.params();
  const std::vector<double> flat = proxies.flatten();
  params.insert(params.end(), flat.begin(), flat.end());
  for (auto _ : state) {
    numerics::Tape tape(params);
    const auto leaves = model.bind(tape, 0);
    const ProxyNodes nodes = bind_proxies(tape, proxies, model.param_count());
    std::vector<numerics::Var> z;
    for (std::size_t i = 0; i < batch; ++i) {
      z.push_back(model.embed(tape, leaves, x.row(i)));
    }
    const numerics::Var loss = pa_loss(tape, z, labels, nodes, LossConfig{});
    benchmark::DoNotOptimize(tape.gradient(loss));
  }
}
BENCHMARK(BM_PaLossGradient)->Arg(64)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace cgcd

BENCHMARK_MAIN();
