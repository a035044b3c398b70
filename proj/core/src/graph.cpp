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

#include "dgcdr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dgcdr/errors.hpp"

namespace dgcdr {
namespace {

void build_csr(int n_rows, const std::vector<std::pair<int, int>>& edges,
               std::vector<std::size_t>& offsets, std::vector<int>& nbrs) {
  offsets.assign(static_cast<std::size_t>(n_rows) + 1, 0);
  for (const auto& [r, c] : edges) ++offsets[r + 1];
  for (int r = 0; r < n_rows; ++r) offsets[r + 1] += offsets[r];
  nbrs.resize(edges.size());
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (const auto& [r, c] : edges) nbrs[fill[r]++] = c;  // edges pre-sorted
}

}  // namespace

BipartiteGraph BipartiteGraph::from_pairs(int n_users, int n_items,
                                          std::span<const UserItem> pairs) {
  BipartiteGraph g;
  g.n_users_ = n_users;
  g.n_items_ = n_items;

  std::vector<std::pair<int, int>> ui;
  ui.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.user < 0 || p.user >= n_users || p.item < 0 || p.item >= n_items) {
      throw DataError("edge (" + std::to_string(p.user) + "," + std::to_string(p.item) +
                      ") outside graph bounds");
    }
    ui.emplace_back(p.user, p.item);
  }
  std::sort(ui.begin(), ui.end());
  ui.erase(std::unique(ui.begin(), ui.end()), ui.end());

  std::vector<std::pair<int, int>> iu;
  iu.reserve(ui.size());
  for (const auto& [u, i] : ui) iu.emplace_back(i, u);
  std::sort(iu.begin(), iu.end());

  build_csr(n_users, ui, g.user_offsets_, g.user_nbrs_);
  build_csr(n_items, iu, g.item_offsets_, g.item_nbrs_);

  auto degree = [](const std::vector<std::size_t>& off, int r) {
    return static_cast<double>(off[r + 1] - off[r]);
  };
  g.user_norm_.resize(g.user_nbrs_.size());
  for (int u = 0; u < n_users; ++u) {
    for (std::size_t k = g.user_offsets_[u]; k < g.user_offsets_[u + 1]; ++k) {
      const int i = g.user_nbrs_[k];
      g.user_norm_[k] = 1.0 / std::sqrt(degree(g.user_offsets_, u) * degree(g.item_offsets_, i));
    }
  }
  g.item_norm_.resize(g.item_nbrs_.size());
  for (int i = 0; i < n_items; ++i) {
    for (std::size_t k = g.item_offsets_[i]; k < g.item_offsets_[i + 1]; ++k) {
      const int u = g.item_nbrs_[k];
      g.item_norm_[k] = 1.0 / std::sqrt(degree(g.user_offsets_, u) * degree(g.item_offsets_, i));
    }
  }
  return g;
}

std::span<const int> BipartiteGraph::user_neighbors(int u) const {
  return {user_nbrs_.data() + user_offsets_[u], user_offsets_[u + 1] - user_offsets_[u]};
}

std::span<const double> BipartiteGraph::user_norms(int u) const {
  return {user_norm_.data() + user_offsets_[u], user_offsets_[u + 1] - user_offsets_[u]};
}

std::span<const int> BipartiteGraph::item_neighbors(int i) const {
  return {item_nbrs_.data() + item_offsets_[i], item_offsets_[i + 1] - item_offsets_[i]};
}

std::span<const double> BipartiteGraph::item_norms(int i) const {
  return {item_norm_.data() + item_offsets_[i], item_offsets_[i + 1] - item_offsets_[i]};
}

double BipartiteGraph::norm(int u, int i) const {
  const auto nbrs = user_neighbors(u);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), i);
  if (it == nbrs.end() || *it != i) return 0.0;
  return user_norms(u)[static_cast<std::size_t>(it - nbrs.begin())];
}

BipartiteGraph build_graph(const ProcessedDataset& ds, Domain domain) {
  if (!ds.has_splits()) throw DataError("dataset has no split labels");
  const auto train = ds.pairs(domain, Split::Train);
  auto g = BipartiteGraph::from_pairs(ds.n_users(), ds.n_items(domain), train);
  const char letter = domain_letter(domain);
  for (int u = 0; u < g.n_users(); ++u) {
    if (g.user_neighbors(u).empty()) {
      throw IsolatedNode(std::string("user ") + std::to_string(u) +
                         " has no train interactions in domain " + letter);
    }
  }
  for (int i = 0; i < g.n_items(); ++i) {
    if (g.item_neighbors(i).empty()) {
      throw IsolatedNode(std::string("item ") + std::to_string(i) +
                         " has no train interactions in domain " + letter);
    }
  }
  return g;
}

}  // namespace dgcdr
