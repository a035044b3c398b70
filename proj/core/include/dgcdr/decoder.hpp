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

// Anchor-based contrastive decoder. Features of one domain are carried into
// the other through that domain's mapping network, then ordered against the
// receiving domain's GNN-enhanced anchor: shared above GNN above specific.

#include "dgcdr/diff.hpp"
#include "dgcdr/encoder.hpp"
#include "dgcdr/gate.hpp"

namespace dgcdr {

// e * MLP(e; phi).
diff::Var map_transfer(diff::Tape& tape, diff::Var features, const GateNetwork& phi,
                       double dropout, diff::Rng* rng);

// Features landing in one domain, produced from the other domain's features.
struct TransformedFeatures {
  diff::Var shared;    // ê^c
  diff::Var gnn;       // ê^g
  diff::Var specific;  // ê^s
};

// Applies the source domain's mapping network to its g/c/s user features.
TransformedFeatures transform_from(diff::Tape& tape, diff::Var gnn, diff::Var shared,
                                   diff::Var specific, const GateNetwork& source_phi,
                                   double dropout, diff::Rng* rng);

// Two-way ratio loss with dot-product similarity, mean over rows.
diff::Var pairwise_contrastive(diff::Var anchor, diff::Var pos, diff::Var neg, double tau);

struct DecoderTerms {
  diff::Var a_shared_over_gnn;
  diff::Var a_gnn_over_specific;
  diff::Var b_shared_over_gnn;
  diff::Var b_gnn_over_specific;
  diff::Var total;
};

// Sum of the four hierarchical terms. `into_a` holds features transformed
// from B into A (via phi_B); `into_b` the reverse.
DecoderTerms decoder_loss(diff::Var anchor_a, diff::Var anchor_b, const TransformedFeatures& into_a,
                          const TransformedFeatures& into_b, double tau);

}  // namespace dgcdr
