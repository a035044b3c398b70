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

// Top-K ranking evaluation: candidate ranking with deterministic tie-break,
// Recall/HR/MRR/NDCG, and mean/std aggregation across seeds.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dgcdr/corpus.hpp"
#include "dgcdr/diff.hpp"

namespace dgcdr {

enum class Metric { Recall = 0, HitRate = 1, Mrr = 2, Ndcg = 3 };

inline constexpr std::array<Metric, 4> kMetrics{Metric::Recall, Metric::HitRate, Metric::Mrr,
                                                Metric::Ndcg};
const char* metric_name(Metric m);

struct RankedList {
  int user = 0;
  std::vector<int> items;     // descending score, ties by ascending id
  std::vector<int> relevant;  // sorted ascending
};

struct CandidateOptions {
  // 0 ranks every non-excluded item; C > 0 ranks C uniformly sampled
  // non-relevant items plus the relevant ones.
  int sampled = 0;
  std::uint64_t seed = 0;
};

// `excluded` and `relevant` must be sorted. Throws NoTestItems when
// `relevant` is empty.
RankedList rank_candidates(int user, std::span<const double> scores,
                           std::span<const int> excluded, std::span<const int> relevant,
                           const CandidateOptions& options = {});

double recall_at_k(const RankedList& r, int k);
double hr_at_k(const RankedList& r, int k);
double mrr_at_k(const RankedList& r, int k);
double ndcg_at_k(const RankedList& r, int k);
double metric_at_k(Metric m, const RankedList& r, int k);

using MetricKey = std::pair<Metric, int>;
using MetricTable = std::map<MetricKey, double>;

// Averages each metric over users holding at least one interaction of
// `split` in domain d. Train items are excluded from ranking, and for the
// test split validation items too.
MetricTable evaluate_split(const diff::Matrix& scores, const ProcessedDataset& ds, Domain d,
                           Split split, std::span<const int> ks,
                           const CandidateOptions& options = {});

struct MetricsReport {
  std::vector<std::uint64_t> seeds;
  std::vector<MetricTable> per_seed;
  MetricTable mean;
  MetricTable stddev;  // sample standard deviation; 0 for a single seed
};

MetricsReport aggregate_seeds(std::span<const std::uint64_t> seeds,
                              std::span<const MetricTable> per_seed);

// One score matrix per seed, evaluated on the test split of domain d.
MetricsReport evaluate_model(std::span<const diff::Matrix> per_seed_scores,
                             const ProcessedDataset& ds, Domain d, std::span<const int> ks,
                             std::span<const std::uint64_t> seeds,
                             const CandidateOptions& options = {});

}  // namespace dgcdr
