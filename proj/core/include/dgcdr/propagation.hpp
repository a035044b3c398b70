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

// Collaborative-filtering propagation over one domain's bipartite graph:
//
//   e_u' = e_u + sum_{i in N_u} c_ui (e_i + e_i * e_u)
//   e_i' = e_i + sum_{u in N_i} c_ui (e_u + e_u * e_i)
//
// with c_ui = 1/sqrt(|N_u||N_i|), followed by concatenation of layers 0..H.
// Since the element-wise product distributes over the neighbour sum, each
// layer is evaluated as e + A + e * A where A is the normalised aggregate.

#include "dgcdr/diff.hpp"
#include "dgcdr/graph.hpp"

namespace dgcdr {

// sum_{i in N_u} c_ui x_i for every user (n_users x d). Differentiable.
diff::Var aggregate_to_users(const BipartiteGraph& graph, diff::Var item_rows);
// sum_{u in N_i} c_ui x_u for every item (n_items x d). Differentiable.
diff::Var aggregate_to_items(const BipartiteGraph& graph, diff::Var user_rows);

struct LayerPair {
  diff::Var users;
  diff::Var items;
};

LayerPair propagate_layer(const BipartiteGraph& graph, diff::Var users, diff::Var items);

struct GnnEmbedding {
  diff::Var users;  // n_users x d(H+1)
  diff::Var items;  // n_items x d(H+1)
};

GnnEmbedding multi_layer_embed(const BipartiteGraph& graph, diff::Var user_table,
                               diff::Var item_table, int layers);

}  // namespace dgcdr
