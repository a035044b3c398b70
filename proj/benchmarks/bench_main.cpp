/*
 * Copyright 2026 The DGCDR Toolkit Authors.
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

#include <numeric>
#include <random>

#include "dgcdr/eval.hpp"
#include "dgcdr/model.hpp"
#include "dgcdr/propagation.hpp"
#include "dgcdr/synth.hpp"
#include "dgcdr/train.hpp"

using namespace dgcdr;

namespace {

const ProcessedDataset& dataset() {
  static const ProcessedDataset ds = [] {
    SynthSpec spec;
    SplitSpec split;
    split.seed = 1;
    return synth_dataset(spec, split);
  }();
  return ds;
}

TrainConfig config(int dim) {
  TrainConfig cfg;
  cfg.dim = dim;
  cfg.layers = 3;
  cfg.batch_size = 50;
  return cfg;
}

void BM_Propagation(benchmark::State& state) {
  const auto& ds = dataset();
  const auto graph = build_graph(ds, Domain::A);
  const int dim = static_cast<int>(state.range(0));
  const auto eu = diff::xavier_init(ds.n_users(), dim, 1);
  const auto ei = diff::xavier_init(ds.n_items(Domain::A), dim, 2);
  for (auto _ : state) {
    diff::Tape t;
    auto out = multi_layer_embed(graph, t.constant(eu), t.constant(ei), 3);
    benchmark::DoNotOptimize(out.users.value().data());
  }
}
BENCHMARK(BM_Propagation)->Arg(16)->Arg(64);

void BM_TrainStep(benchmark::State& state) {
  const auto& ds = dataset();
  const auto graphs = build_graphs(ds);
  DgcdrModel model(ds.n_users(), {ds.n_items(Domain::A), ds.n_items(Domain::B)},
                   config(static_cast<int>(state.range(0))), 1);
  const std::array<NegativeSampler, 2> samplers{NegativeSampler(ds, Domain::A),
                                                NegativeSampler(ds, Domain::B)};
  diff::Rng rng(3);
  const auto batches = epoch_batches(ds, 50, samplers, rng);
  diff::AdamState adam;
  std::size_t k = 0;
  for (auto _ : state) {
    diff::Tape tape;
    const auto terms = model.compute_loss(tape, graphs, batches[k++ % batches.size()], &rng);
    tape.backward(terms.total);
    diff::adam_step(model.store(), adam);
  }
}
BENCHMARK(BM_TrainStep)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FullRankingEval(benchmark::State& state) {
  const auto& ds = dataset();
  const auto graphs = build_graphs(ds);
  const DgcdrModel model(ds.n_users(), {ds.n_items(Domain::A), ds.n_items(Domain::B)}, config(16), 1);
  const auto scores = model.score_matrix(graphs, ds.target);
  const int ks[] = {10, 20};
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_split(scores, ds, ds.target, Split::Test, ks));
  }
}
BENCHMARK(BM_FullRankingEval)->Unit(benchmark::kMillisecond);

void BM_Ndcg(benchmark::State& state) {
  std::vector<int> items(static_cast<std::size_t>(state.range(0)));
  std::iota(items.begin(), items.end(), 0);
  std::shuffle(items.begin(), items.end(), std::mt19937_64(4));
  const RankedList r{0, items, {1, 5, 9}};
  for (auto _ : state) benchmark::DoNotOptimize(ndcg_at_k(r, 20));
}
BENCHMARK(BM_Ndcg)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
