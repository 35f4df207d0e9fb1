/*
 * Copyright 2026 The onebp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <onebp/data.hpp>
#include <onebp/eval.hpp>
#include <onebp/loss.hpp>
#include <onebp/model.hpp>
#include <onebp/trainer.hpp>

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

using namespace onebp;

// Synthetic log with MovieLens-100k proportions.
const DataSplit& synthetic_split() {
  static const DataSplit split = [] {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<ItemIndex> item(0, 1681);
    std::vector<Interaction> pairs;
    std::vector<bool> seen(943 * 1682, false);
    while (pairs.size() < 100000) {
      const UserIndex u = UserIndex(pairs.size() % 943);
      const ItemIndex i = item(rng);
      if (seen[u * 1682 + i]) continue;
      seen[u * 1682 + i] = true;
      pairs.push_back({u, i});
    }
    return split_holdout(InteractionDataset(943, 1682, std::move(pairs)), 0.2, 1);
  }();
  return split;
}

void BM_Epoch(benchmark::State& state) {
  const auto& split = synthetic_split();
  TrainConfig cfg;
  cfg.strategy = static_cast<Strategy>(state.range(0));
  cfg.learning_rate = default_learning_rate(cfg.strategy);
  auto model = init_model(943, 1682, cfg.dim, cfg.seed);
  std::size_t epoch = 0;
  for (auto _ : state) {
    auto rngs = EpochRngs::derive(cfg.seed, epoch);
    benchmark::DoNotOptimize(train_epoch(model, split.train, cfg, epoch++, rngs, 1));
  }
  state.SetLabel(std::string(to_string(cfg.strategy)));
  state.SetItemsProcessed(state.iterations() * std::int64_t(split.train.size()));
}
BENCHMARK(BM_Epoch)
    ->Arg(int(Strategy::TwoBP))
    ->Arg(int(Strategy::OneBP))
    ->Arg(int(Strategy::UserOnlyBP))
    ->Unit(benchmark::kMillisecond);

void BM_InfoNCEGrads(benchmark::State& state) {
  const std::size_t d = std::size_t(state.range(0)), ns = std::size_t(state.range(1));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 0.1);
  std::vector<double> u(d), pos(d);
  std::vector<std::vector<double>> negs(ns, std::vector<double>(d));
  for (auto& x : u) x = g(rng);
  for (auto& x : pos) x = g(rng);
  for (auto& v : negs)
    for (auto& x : v) x = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(infonce_grads(u, pos, negs));
}
BENCHMARK(BM_InfoNCEGrads)->Args({64, 1})->Args({64, 5})->Args({64, 20});

void BM_Evaluate(benchmark::State& state) {
  const auto& split = synthetic_split();
  const auto model = init_model(943, 1682, 64, 1);
  const std::size_t cutoffs[] = {5, 10, 20};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(model, split, cutoffs, std::size_t(state.range(0))));
}
BENCHMARK(BM_Evaluate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
