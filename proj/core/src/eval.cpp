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

#include "dgcdr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dgcdr/errors.hpp"

namespace dgcdr {
namespace {

void check_k(int k) {
  if (k < 1) throw ConfigError("cutoff k must be >= 1");
}

bool contains_sorted(std::span<const int> sorted, int value) {
  return std::binary_search(sorted.begin(), sorted.end(), value);
}

std::size_t hits_in_top(const RankedList& r, int k) {
  const auto limit = std::min<std::size_t>(static_cast<std::size_t>(k), r.items.size());
  std::size_t hits = 0;
  for (std::size_t pos = 0; pos < limit; ++pos) {
    if (contains_sorted(r.relevant, r.items[pos])) ++hits;
  }
  return hits;
}

void require_relevant(const RankedList& r) {
  if (r.relevant.empty()) throw EmptyRelevantSet();
}

}  // namespace

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::Recall:
      return "recall";
    case Metric::HitRate:
      return "hr";
    case Metric::Mrr:
      return "mrr";
    case Metric::Ndcg:
      return "ndcg";
  }
  return "?";
}

RankedList rank_candidates(int user, std::span<const double> scores,
                           std::span<const int> excluded, std::span<const int> relevant,
                           const CandidateOptions& options) {
  if (relevant.empty()) throw NoTestItems(user);
  RankedList out;
  out.user = user;
  out.relevant.assign(relevant.begin(), relevant.end());

  const int n_items = static_cast<int>(scores.size());
  if (options.sampled > 0) {
    std::vector<int> pool;
    for (int i = 0; i < n_items; ++i) {
      if (!contains_sorted(excluded, i) && !contains_sorted(relevant, i)) pool.push_back(i);
    }
    std::mt19937_64 rng(options.seed ^ (static_cast<std::uint64_t>(user) * 0x9E3779B97F4A7C15ULL));
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(options.sampled), pool.size());
    // Partial Fisher-Yates.
    for (std::size_t k = 0; k < take; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
    }
    out.items.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
    for (int i : relevant) {
      if (!contains_sorted(excluded, i)) out.items.push_back(i);
    }
  } else {
    out.items.reserve(scores.size());
    for (int i = 0; i < n_items; ++i) {
      if (!contains_sorted(excluded, i)) out.items.push_back(i);
    }
  }
  std::sort(out.items.begin(), out.items.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return out;
}

double recall_at_k(const RankedList& r, int k) {
  check_k(k);
  require_relevant(r);
  return static_cast<double>(hits_in_top(r, k)) / static_cast<double>(r.relevant.size());
}

double hr_at_k(const RankedList& r, int k) {
  check_k(k);
  require_relevant(r);
  return hits_in_top(r, k) > 0 ? 1.0 : 0.0;
}

double mrr_at_k(const RankedList& r, int k) {
  check_k(k);
  require_relevant(r);
  const auto limit = std::min<std::size_t>(static_cast<std::size_t>(k), r.items.size());
  for (std::size_t pos = 0; pos < limit; ++pos) {
    if (contains_sorted(r.relevant, r.items[pos])) return 1.0 / static_cast<double>(pos + 1);
  }
  return 0.0;
}

double ndcg_at_k(const RankedList& r, int k) {
  check_k(k);
  require_relevant(r);
  const auto limit = std::min<std::size_t>(static_cast<std::size_t>(k), r.items.size());
  double dcg = 0.0;
  for (std::size_t pos = 0; pos < limit; ++pos) {
    if (contains_sorted(r.relevant, r.items[pos])) dcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);
  }
  const auto ideal = std::min<std::size_t>(static_cast<std::size_t>(k), r.relevant.size());
  double idcg = 0.0;
  for (std::size_t pos = 0; pos < ideal; ++pos) idcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);
  return dcg / idcg;
}

double metric_at_k(Metric m, const RankedList& r, int k) {
  switch (m) {
    case Metric::Recall:
      return recall_at_k(r, k);
    case Metric::HitRate:
      return hr_at_k(r, k);
    case Metric::Mrr:
      return mrr_at_k(r, k);
    case Metric::Ndcg:
      return ndcg_at_k(r, k);
  }
  return 0.0;
}

MetricTable evaluate_split(const diff::Matrix& scores, const ProcessedDataset& ds, Domain d,
                           Split split, std::span<const int> ks, const CandidateOptions& options) {
  if (scores.rows() != ds.n_users() || scores.cols() != ds.n_items(d)) {
    throw ShapeMismatch("evaluate_split", scores.rows(), scores.cols(), ds.n_users(),
                        ds.n_items(d));
  }
  for (int k : ks) check_k(k);
  const auto relevant = ds.user_items(d, {split});
  const auto excluded = split == Split::Test ? ds.user_items(d, {Split::Train, Split::Valid})
                                             : ds.user_items(d, {Split::Train});
  MetricTable sums;
  for (Metric m : kMetrics) {
    for (int k : ks) sums[{m, k}] = 0.0;
  }
  std::size_t users = 0;
  std::vector<double> row(static_cast<std::size_t>(scores.cols()));
  for (int u = 0; u < ds.n_users(); ++u) {
    if (relevant[u].empty()) continue;
    for (Eigen::Index i = 0; i < scores.cols(); ++i) row[i] = scores(u, i);
    const RankedList ranked = rank_candidates(u, row, excluded[u], relevant[u], options);
    for (Metric m : kMetrics) {
      for (int k : ks) sums[{m, k}] += metric_at_k(m, ranked, k);
    }
    ++users;
  }
  if (users == 0) throw NoTestItems(-1);
  for (auto& [key, value] : sums) value /= static_cast<double>(users);
  return sums;
}

MetricsReport aggregate_seeds(std::span<const std::uint64_t> seeds,
                              std::span<const MetricTable> per_seed) {
  if (seeds.size() != per_seed.size() || per_seed.empty()) {
    throw Error("aggregate_seeds needs one metric table per seed");
  }
  MetricsReport report;
  report.seeds.assign(seeds.begin(), seeds.end());
  report.per_seed.assign(per_seed.begin(), per_seed.end());
  const auto n = static_cast<double>(per_seed.size());
  for (const auto& [key, unused] : per_seed.front()) {
    double total = 0.0;
    for (const auto& table : per_seed) total += table.at(key);
    const double mean = total / n;
    double ss = 0.0;
    for (const auto& table : per_seed) ss += (table.at(key) - mean) * (table.at(key) - mean);
    report.mean[key] = mean;
    report.stddev[key] = per_seed.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  return report;
}

MetricsReport evaluate_model(std::span<const diff::Matrix> per_seed_scores,
                             const ProcessedDataset& ds, Domain d, std::span<const int> ks,
                             std::span<const std::uint64_t> seeds,
                             const CandidateOptions& options) {
  std::vector<MetricTable> tables;
  tables.reserve(per_seed_scores.size());
  for (const auto& scores : per_seed_scores) {
    tables.push_back(evaluate_split(scores, ds, d, Split::Test, ks, options));
  }
  return aggregate_seeds(seeds, tables);
}

}  // namespace dgcdr
