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

#include "dgcdr/train.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "dgcdr/errors.hpp"
#include "dgcdr/eval.hpp"

namespace dgcdr {

NegativeSampler::NegativeSampler(const ProcessedDataset& ds, Domain d)
    : n_items_(ds.n_items(d)),
      seen_(ds.user_items(d, {Split::Train, Split::Valid, Split::Test})) {}

int NegativeSampler::admissible(int user) const {
  return n_items_ - static_cast<int>(seen_[user].size());
}

int NegativeSampler::draw(int user, diff::Rng& rng) const {
  const int free = admissible(user);
  if (free <= 0) throw NoNegativeAvailable(user);
  std::uniform_int_distribution<int> pick(0, free - 1);
  // k-th item of the complement: shift past every seen id <= candidate.
  int item = pick(rng);
  for (int s : seen_[user]) {
    if (s <= item) {
      ++item;
    } else {
      break;
    }
  }
  return item;
}

std::vector<int> sample_negatives(const ProcessedDataset& ds, Domain d, std::span<const int> users,
                                  std::uint64_t seed) {
  const NegativeSampler sampler(ds, d);
  diff::Rng rng(seed);
  std::vector<int> out;
  out.reserve(users.size());
  for (int u : users) out.push_back(sampler.draw(u, rng));
  return out;
}

std::vector<StepBatch> epoch_batches(const ProcessedDataset& ds, int batch_size,
                                     const std::array<NegativeSampler, 2>& samplers,
                                     diff::Rng& rng) {
  const int n_users = ds.n_users();
  std::array<std::vector<std::deque<int>>, 2> queues;
  for (Domain d : kDomains) {
    auto lists = ds.user_items(d, {Split::Train});
    auto& q = queues[index(d)];
    q.resize(static_cast<std::size_t>(n_users));
    for (int u = 0; u < n_users; ++u) {
      std::shuffle(lists[u].begin(), lists[u].end(), rng);
      q[u].assign(lists[u].begin(), lists[u].end());
    }
  }

  std::vector<StepBatch> batches;
  while (true) {
    std::vector<int> active;
    for (int u = 0; u < n_users; ++u) {
      if (!queues[0][u].empty() || !queues[1][u].empty()) active.push_back(u);
    }
    if (active.empty()) break;
    std::shuffle(active.begin(), active.end(), rng);
    for (std::size_t start = 0; start < active.size(); start += static_cast<std::size_t>(batch_size)) {
      const auto stop = std::min(active.size(), start + static_cast<std::size_t>(batch_size));
      StepBatch batch;
      batch.users.assign(active.begin() + static_cast<std::ptrdiff_t>(start),
                         active.begin() + static_cast<std::ptrdiff_t>(stop));
      for (int u : batch.users) {
        for (Domain d : kDomains) {
          auto& q = queues[index(d)][u];
          if (q.empty()) continue;
          const int pos = q.front();
          q.pop_front();
          batch.triplets[index(d)].push_back({u, pos, samplers[index(d)].draw(u, rng)});
        }
      }
      batches.push_back(std::move(batch));
    }
  }
  return batches;
}

double validation_recall(const DgcdrModel& model, const DomainGraphs& graphs,
                         const ProcessedDataset& ds, int k) {
  const diff::Matrix scores = model.score_matrix(graphs, ds.target);
  const int ks[] = {k};
  const MetricTable table = evaluate_split(scores, ds, ds.target, Split::Valid, ks);
  return table.at({Metric::Recall, k});
}

namespace {

bool finite(const LossBreakdown& v) {
  return std::isfinite(v.rec) && std::isfinite(v.en) && std::isfinite(v.de) &&
         std::isfinite(v.item) && std::isfinite(v.reg) && std::isfinite(v.total);
}

void accumulate(LossBreakdown& sum, const LossBreakdown& v) {
  sum.rec += v.rec;
  sum.en += v.en;
  sum.de += v.de;
  sum.item += v.item;
  sum.reg += v.reg;
  sum.total += v.total;
  sum.lambda_en = v.lambda_en;
  sum.lambda_de = v.lambda_de;
  sum.lambda_item = v.lambda_item;
  sum.lambda_reg = v.lambda_reg;
}

}  // namespace

TrainResult train(const ProcessedDataset& ds, const TrainConfig& cfg, const TrainHooks& hooks) {
  cfg.validate();
  const DomainGraphs graphs = build_graphs(ds);
  const std::array<NegativeSampler, 2> samplers{NegativeSampler(ds, Domain::A),
                                                NegativeSampler(ds, Domain::B)};
  DgcdrModel model(ds.n_users(), {ds.n_items(Domain::A), ds.n_items(Domain::B)}, cfg, cfg.seed);
  diff::AdamState adam;
  adam.lr = cfg.lr;
  adam.validate();
  diff::Rng rng(cfg.seed ^ 0xA5A5A5A5DEADBEEFULL);

  TrainResult result{model, {}, 0, -1.0, 0};
  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto batches = epoch_batches(ds, cfg.batch_size, samplers, rng);
    LossBreakdown sum;
    for (const auto& batch : batches) {
      diff::Tape tape;
      LossTerms terms;
      try {
        terms = model.compute_loss(tape, graphs, batch, &rng);
      } catch (const ZeroVector&) {
        // Features collapsed to zero; the run has left the usable regime.
        throw Diverged(epoch);
      }
      if (!finite(terms.values)) throw Diverged(epoch);
      tape.backward(terms.total);
      try {
        diff::adam_step(model.store(), adam);
      } catch (const NonFiniteGradient&) {
        throw Diverged(epoch);
      }
      accumulate(sum, terms.values);
    }
    const auto steps = static_cast<double>(std::max<std::size_t>(batches.size(), 1));
    EpochRecord record;
    record.epoch = epoch;
    record.loss = sum;
    record.loss.rec /= steps;
    record.loss.en /= steps;
    record.loss.de /= steps;
    record.loss.item /= steps;
    record.loss.reg /= steps;
    record.loss.total /= steps;
    record.valid_metric = hooks.validate ? hooks.validate(model, epoch)
                                         : validation_recall(model, graphs, ds, cfg.monitor_k);
    result.history.push_back(record);
    if (hooks.on_epoch) hooks.on_epoch(record);
    result.stopped_epoch = epoch;

    if (record.valid_metric > result.best_valid) {
      result.best_valid = record.valid_metric;
      result.best_epoch = epoch;
      result.model = model;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace dgcdr
