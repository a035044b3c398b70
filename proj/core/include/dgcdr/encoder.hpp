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

// Disentangling encoder: gated projection of GNN-enhanced embeddings into
// domain-shared and domain-specific parts, the alignment/orthogonality
// loss, attention fusion, and the item-view contrastive loss.

#include <span>

#include "dgcdr/corpus.hpp"
#include "dgcdr/diff.hpp"
#include "dgcdr/gate.hpp"

namespace dgcdr {

struct DisentangledFeatures {
  diff::Var shared;    // e^c
  diff::Var specific;  // e^s
};

// e^c = e^g * gate_c(e^g), e^s = e^g * gate_s(e^g).
DisentangledFeatures disentangle_project(diff::Tape& tape, diff::Var gnn,
                                         const GateNetwork& shared_gate,
                                         const GateNetwork& specific_gate, double dropout,
                                         diff::Rng* rng);

// 1 - <a,b>/(|a||b|). Throws ZeroVector.
double cosine_distance(std::span<const double> a, std::span<const double> b);

// Mean over users of
//   dis(c_A, c_B) + <c_A, s_A>^2 + <c_B, s_B>^2.
// All four inputs hold the same users in the same row order.
diff::Var encoder_loss(diff::Var shared_a, diff::Var specific_a, diff::Var shared_b,
                       diff::Var specific_b);

// n x 2 softmax of (<g,c>/sqrt(width), <g,s>/sqrt(width)); column 0 is the
// shared weight, column 1 the specific weight.
diff::Var attention_weights(diff::Var gnn, diff::Var shared, diff::Var specific, double width);

// e = e^g + a^c e^c + a^s e^s.
diff::Var fuse_features(diff::Var gnn, diff::Var shared, diff::Var specific, diff::Var weights);

// Mean over rows of -log( exp(<anchor,pos>/tau) / (exp(<anchor,pos>/tau) +
// exp(<anchor,neg>/tau)) ), evaluated as softplus((<anchor,neg> -
// <anchor,pos>)/tau) so large logits cannot overflow.
diff::Var ratio_contrastive(diff::Var anchor, diff::Var pos, diff::Var neg, double tau);

// Item-view contrastive term for one domain. Each pair (user row, item row)
// indexes `own_specific` / `other_specific` (user rows) and `items` (fused
// item rows). The item should agree more with the user's own-domain
// specific feature than with the other domain's.
diff::Var item_contrastive_loss(std::span<const UserItem> pairs, diff::Var own_specific,
                                diff::Var other_specific, diff::Var items, double tau);

}  // namespace dgcdr
