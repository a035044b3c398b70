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

#include "dgcdr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "dgcdr/errors.hpp"

namespace dgcdr {
namespace {

using diff::Matrix;

Matrix gaussian(int rows, int cols, diff::Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = normal(rng);
  }
  return m;
}

double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double mean_probability(const Matrix& logits, double bias) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    for (Eigen::Index c = 0; c < logits.cols(); ++c) total += sigmoid(logits(r, c) + bias);
  }
  return total / static_cast<double>(logits.size());
}

double solve_bias(const Matrix& logits, double density) {
  double lo = -60.0;
  double hi = 60.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_probability(logits, mid) < density) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Adds the most probable missing pairs until every row and column holds at
// least n entries.
void repair_degrees(std::vector<std::vector<char>>& adj, const Matrix& logits, unsigned n) {
  const auto rows = adj.size();
  const auto cols = rows ? adj[0].size() : 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t r = 0; r < rows; ++r) {
      auto deg = static_cast<unsigned>(std::count(adj[r].begin(), adj[r].end(), 1));
      if (deg >= n) continue;
      std::vector<std::size_t> missing;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!adj[r][c]) missing.push_back(c);
      }
      std::stable_sort(missing.begin(), missing.end(), [&](std::size_t a, std::size_t b) {
        return logits(r, a) > logits(r, b);
      });
      for (std::size_t k = 0; k < missing.size() && deg < n; ++k, ++deg) adj[r][missing[k]] = 1;
      changed = true;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      unsigned deg = 0;
      for (std::size_t r = 0; r < rows; ++r) deg += adj[r][c] ? 1U : 0U;
      if (deg >= n) continue;
      std::vector<std::size_t> missing;
      for (std::size_t r = 0; r < rows; ++r) {
        if (!adj[r][c]) missing.push_back(r);
      }
      std::stable_sort(missing.begin(), missing.end(), [&](std::size_t a, std::size_t b) {
        return logits(a, c) > logits(b, c);
      });
      for (std::size_t k = 0; k < missing.size() && deg < n; ++k, ++deg) adj[missing[k]][c] = 1;
      changed = true;
    }
  }
}

}  // namespace

void SynthSpec::validate() const {
  if (n_users <= 0 || n_items[0] <= 0 || n_items[1] <= 0) {
    throw ConfigError("synthetic sizes must be positive");
  }
  if (shared_dim <= 0 || specific_dim <= 0) throw ConfigError("latent sizes must be positive");
  if (shared_weight < 0.0 || specific_weight < 0.0 || signal < 0.0) {
    throw ConfigError("latent weights and signal must be non-negative");
  }
  if (n_core == 0) throw ConfigError("n_core must be >= 1");
}

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  for (int k = 0; k < 2; ++k) {
    const double floor = static_cast<double>(spec.n_core) /
                         static_cast<double>(std::min(spec.n_users, spec.n_items[k]));
    if (!(spec.density > 0.0 && spec.density < 1.0) || spec.density < floor ||
        static_cast<int>(spec.n_core) > std::min(spec.n_users, spec.n_items[k])) {
      throw DensityUnreachable("density " + std::to_string(spec.density) +
                               " cannot hold the n-core floor " + std::to_string(floor));
    }
  }

  diff::Rng rng(spec.seed);
  SynthData out;
  out.user_shared = gaussian(spec.n_users, spec.shared_dim, rng);
  out.user_specific[0] = gaussian(spec.n_users, spec.specific_dim, rng);
  out.user_specific[1] = gaussian(spec.n_users, spec.specific_dim, rng);
  const int max_items = std::max(spec.n_items[0], spec.n_items[1]);
  const Matrix item_shared = gaussian(max_items, spec.shared_dim, rng);
  const std::array<Matrix, 2> item_specific{gaussian(spec.n_items[0], spec.specific_dim, rng),
                                            gaussian(spec.n_items[1], spec.specific_dim, rng)};

  const double sh = spec.signal * spec.shared_weight / std::sqrt(static_cast<double>(spec.shared_dim));
  const double sp =
      spec.signal * spec.specific_weight / std::sqrt(static_cast<double>(spec.specific_dim));
  for (int k = 0; k < 2; ++k) {
    out.logits[k] = sh * out.user_shared * item_shared.topRows(spec.n_items[k]).transpose() +
                    sp * out.user_specific[k] * item_specific[k].transpose();
    out.bias[k] = solve_bias(out.logits[k], spec.density);

    diff::Rng draw(spec.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k) + 17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<char>> adj(static_cast<std::size_t>(spec.n_users),
                                       std::vector<char>(static_cast<std::size_t>(spec.n_items[k]), 0));
    for (int u = 0; u < spec.n_users; ++u) {
      for (int i = 0; i < spec.n_items[k]; ++i) {
        adj[u][i] = unit(draw) < sigmoid(out.logits[k](u, i) + out.bias[k]) ? 1 : 0;
      }
    }
    repair_degrees(adj, out.logits[k], spec.n_core);

    const char letter = domain_letter(kDomains[k]);
    std::int64_t stamp = 0;
    for (int u = 0; u < spec.n_users; ++u) {
      for (int i = 0; i < spec.n_items[k]; ++i) {
        if (!adj[u][i]) continue;
        out.interactions[k].push_back({"u" + std::to_string(u),
                                       std::string(1, letter) + std::to_string(i), kDomains[k],
                                       stamp++});
      }
    }
  }
  return out;
}

ProcessedDataset synth_dataset(const SynthSpec& spec, const SplitSpec& split) {
  const SynthData data = generate(spec);
  const NcoreResult filtered =
      iterative_ncore_filter(data.interactions[0], data.interactions[1], spec.n_core);
  return split_dataset(build_dataset(filtered, spec.n_core), split);
}

void write_synth(const SynthData& data, const std::filesystem::path& path_a,
                 const std::filesystem::path& path_b) {
  write_interactions(path_a, data.interactions[0]);
  write_interactions(path_b, data.interactions[1]);
}

}  // namespace dgcdr
