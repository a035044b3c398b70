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

#include "dgcdr/encoder.hpp"

#include <cmath>
#include <vector>

#include "dgcdr/errors.hpp"

namespace dgcdr {

using diff::Var;

DisentangledFeatures disentangle_project(diff::Tape& tape, Var gnn, const GateNetwork& shared_gate,
                                         const GateNetwork& specific_gate, double dropout,
                                         diff::Rng* rng) {
  if (gnn.cols() != shared_gate.width() || gnn.cols() != specific_gate.width()) {
    throw ShapeMismatch("disentangle_project", gnn.rows(), gnn.cols(), shared_gate.width(),
                        specific_gate.width());
  }
  return {shared_gate.gate(tape, gnn, dropout, rng), specific_gate.gate(tape, gnn, dropout, rng)};
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeMismatch("cosine_distance", 1, static_cast<long>(a.size()), 1,
                        static_cast<long>(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine distance of a zero vector");
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

Var encoder_loss(Var shared_a, Var specific_a, Var shared_b, Var specific_b) {
  const Var distance = diff::add_scalar(diff::scale(diff::cosine_rows(shared_a, shared_b), -1.0), 1.0);
  const Var ortho_a = diff::square(diff::row_dot(shared_a, specific_a));
  const Var ortho_b = diff::square(diff::row_dot(shared_b, specific_b));
  return diff::mean(diff::add(distance, diff::add(ortho_a, ortho_b)));
}

Var attention_weights(Var gnn, Var shared, Var specific, double width) {
  if (!(width > 0.0)) throw ConfigError("attention width must be positive");
  const double inv_sqrt = 1.0 / std::sqrt(width);
  const Var scores = diff::concat_cols({diff::scale(diff::row_dot(gnn, shared), inv_sqrt),
                                        diff::scale(diff::row_dot(gnn, specific), inv_sqrt)});
  return diff::softmax_rows(scores);
}

Var fuse_features(Var gnn, Var shared, Var specific, Var weights) {
  if (weights.cols() != 2 || weights.rows() != gnn.rows()) {
    throw ShapeMismatch("fuse_features", weights.rows(), weights.cols(), gnn.rows(), 2);
  }
  const Var weighted_shared = diff::scale_rows(diff::column(weights, 0), shared);
  const Var weighted_specific = diff::scale_rows(diff::column(weights, 1), specific);
  return diff::add(gnn, diff::add(weighted_shared, weighted_specific));
}

Var ratio_contrastive(Var anchor, Var pos, Var neg, double tau) {
  if (!(tau > 0.0)) throw ConfigError("temperature must be positive");
  const Var gap = diff::sub(diff::row_dot(anchor, neg), diff::row_dot(anchor, pos));
  return diff::mean(diff::softplus(diff::scale(gap, 1.0 / tau)));
}

Var item_contrastive_loss(std::span<const UserItem> pairs, Var own_specific, Var other_specific,
                          Var items, double tau) {
  std::vector<int> user_rows, item_rows;
  user_rows.reserve(pairs.size());
  item_rows.reserve(pairs.size());
  for (const auto& p : pairs) {
    user_rows.push_back(p.user);
    item_rows.push_back(p.item);
  }
  const Var anchor = diff::gather_rows(items, item_rows);
  return ratio_contrastive(anchor, diff::gather_rows(own_specific, user_rows),
                           diff::gather_rows(other_specific, user_rows), tau);
}

}  // namespace dgcdr
