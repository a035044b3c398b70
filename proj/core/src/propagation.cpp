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

#include "dgcdr/propagation.hpp"

#include "dgcdr/errors.hpp"

namespace dgcdr {
namespace {

using diff::Matrix;
using diff::Tape;
using diff::Var;

// out.row(r) = sum_k norms[k] * x.row(nbrs[k]) for each source row r, in
// ascending neighbour order.
template <class NbrFn, class NormFn>
Matrix spmm(int out_rows, const Matrix& x, NbrFn nbrs_of, NormFn norms_of) {
  Matrix out = Matrix::Zero(out_rows, x.cols());
  for (int r = 0; r < out_rows; ++r) {
    const auto nbrs = nbrs_of(r);
    const auto norms = norms_of(r);
    for (std::size_t k = 0; k < nbrs.size(); ++k) out.row(r) += norms[k] * x.row(nbrs[k]);
  }
  return out;
}

Matrix users_from_items(const BipartiteGraph& g, const Matrix& x) {
  return spmm(
      g.n_users(), x, [&](int u) { return g.user_neighbors(u); },
      [&](int u) { return g.user_norms(u); });
}

Matrix items_from_users(const BipartiteGraph& g, const Matrix& x) {
  return spmm(
      g.n_items(), x, [&](int i) { return g.item_neighbors(i); },
      [&](int i) { return g.item_norms(i); });
}

}  // namespace

Var aggregate_to_users(const BipartiteGraph& graph, Var item_rows) {
  if (item_rows.rows() != graph.n_items()) {
    throw ShapeMismatch("aggregate_to_users", item_rows.rows(), item_rows.cols(),
                        graph.n_items(), item_rows.cols());
  }
  Matrix out = users_from_items(graph, item_rows.value());
  const BipartiteGraph* g = &graph;
  return item_rows.tape()->record(std::move(out), {item_rows},
                                  [g, item_rows](Tape& tp, std::size_t self) {
                                    // Transpose of the user aggregation is the item aggregation.
                                    tp.accumulate(item_rows, items_from_users(*g, tp.grad(self)));
                                  });
}

Var aggregate_to_items(const BipartiteGraph& graph, Var user_rows) {
  if (user_rows.rows() != graph.n_users()) {
    throw ShapeMismatch("aggregate_to_items", user_rows.rows(), user_rows.cols(),
                        graph.n_users(), user_rows.cols());
  }
  Matrix out = items_from_users(graph, user_rows.value());
  const BipartiteGraph* g = &graph;
  return user_rows.tape()->record(std::move(out), {user_rows},
                                  [g, user_rows](Tape& tp, std::size_t self) {
                                    tp.accumulate(user_rows, users_from_items(*g, tp.grad(self)));
                                  });
}

LayerPair propagate_layer(const BipartiteGraph& graph, Var users, Var items) {
  if (users.cols() != items.cols()) {
    throw ShapeMismatch("propagate_layer", users.rows(), users.cols(), items.rows(), items.cols());
  }
  const Var agg_u = aggregate_to_users(graph, items);
  const Var agg_i = aggregate_to_items(graph, users);
  const Var next_u = diff::add(diff::add(users, agg_u), diff::hadamard(users, agg_u));
  const Var next_i = diff::add(diff::add(items, agg_i), diff::hadamard(items, agg_i));
  return {next_u, next_i};
}

GnnEmbedding multi_layer_embed(const BipartiteGraph& graph, Var user_table, Var item_table,
                               int layers) {
  if (layers < 0) throw ConfigError("layer count must be non-negative");
  std::vector<Var> user_layers{user_table};
  std::vector<Var> item_layers{item_table};
  LayerPair current{user_table, item_table};
  for (int h = 0; h < layers; ++h) {
    current = propagate_layer(graph, current.users, current.items);
    user_layers.push_back(current.users);
    item_layers.push_back(current.items);
  }
  if (layers == 0) return {user_table, item_table};
  return {diff::concat_cols(user_layers), diff::concat_cols(item_layers)};
}

}  // namespace dgcdr
