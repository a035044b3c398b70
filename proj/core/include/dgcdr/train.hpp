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

#pragma once

// Uniform negative sampling and the joint dual-domain training loop with
// early stopping.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dgcdr/corpus.hpp"
#include "dgcdr/model.hpp"

namespace dgcdr {

// Draws uniformly from the items a user never interacted with in a domain
// (any split).
class NegativeSampler {
 public:
  NegativeSampler(const ProcessedDataset& ds, Domain d);
  // Throws NoNegativeAvailable when the user touched every item.
  int draw(int user, diff::Rng& rng) const;
  int admissible(int user) const;

 private:
  int n_items_ = 0;
  std::vector<std::vector<int>> seen_;
};

// One negative per entry of `users`, from a generator seeded with `seed`.
std::vector<int> sample_negatives(const ProcessedDataset& ds, Domain d, std::span<const int> users,
                                  std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  LossBreakdown loss;  // averaged over the epoch's steps
  double valid_metric = 0.0;
};

struct TrainHooks {
  // Replaces the default Recall@K monitor when set; called once per epoch.
  std::function<double(const DgcdrModel&, int epoch)> validate;
  // Invoked after each epoch record is appended.
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  DgcdrModel model;  // parameters of the best validation epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_valid = 0.0;
  int stopped_epoch = 0;
};

// Builds the StepBatches of one epoch.
std::vector<StepBatch> epoch_batches(const ProcessedDataset& ds, int batch_size,
                                     const std::array<NegativeSampler, 2>& samplers,
                                     diff::Rng& rng);

// Recall@k on the valid split of the target domain, excluding train items.
double validation_recall(const DgcdrModel& model, const DomainGraphs& graphs,
                         const ProcessedDataset& ds, int k);

// Throws Diverged on a non-finite loss or gradient, or when features collapse to zero.
TrainResult train(const ProcessedDataset& ds, const TrainConfig& cfg, const TrainHooks& hooks = {});

}  // namespace dgcdr
