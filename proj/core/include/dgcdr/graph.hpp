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

#include <span>
#include <vector>

#include "dgcdr/corpus.hpp"

namespace dgcdr {

// Per-domain user-item bipartite graph in CSR form, both directions, with
// the symmetric degree normalisation 1/sqrt(|N_u| |N_i|) stored per edge.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  // Builds from arbitrary pairs; duplicates are collapsed and nodes may be
  // isolated. Neighbour lists are sorted ascending.
  static BipartiteGraph from_pairs(int n_users, int n_items, std::span<const UserItem> pairs);

  int n_users() const { return n_users_; }
  int n_items() const { return n_items_; }
  std::size_t num_edges() const { return user_nbrs_.size(); }

  std::span<const int> user_neighbors(int u) const;
  std::span<const double> user_norms(int u) const;
  std::span<const int> item_neighbors(int i) const;
  std::span<const double> item_norms(int i) const;

  // Normalisation coefficient for edge (u,i); 0 when the edge is absent.
  double norm(int u, int i) const;

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

 private:
  int n_users_ = 0;
  int n_items_ = 0;
  std::vector<std::size_t> user_offsets_;
  std::vector<int> user_nbrs_;
  std::vector<double> user_norm_;
  std::vector<std::size_t> item_offsets_;
  std::vector<int> item_nbrs_;
  std::vector<double> item_norm_;
};

// Graph over the train split of one domain. Throws IsolatedNode if any user
// or item lacks a train interaction.
BipartiteGraph build_graph(const ProcessedDataset& ds, Domain domain);

}  // namespace dgcdr
