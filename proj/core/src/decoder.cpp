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

#include "dgcdr/decoder.hpp"

#include "dgcdr/errors.hpp"

namespace dgcdr {

using diff::Var;

Var map_transfer(diff::Tape& tape, Var features, const GateNetwork& phi, double dropout,
                 diff::Rng* rng) {
  if (features.cols() != phi.width()) {
    throw ShapeMismatch("map_transfer", features.rows(), features.cols(), phi.width(), phi.width());
  }
  return phi.gate(tape, features, dropout, rng);
}

TransformedFeatures transform_from(diff::Tape& tape, Var gnn, Var shared, Var specific,
                                   const GateNetwork& source_phi, double dropout, diff::Rng* rng) {
  return {map_transfer(tape, shared, source_phi, dropout, rng),
          map_transfer(tape, gnn, source_phi, dropout, rng),
          map_transfer(tape, specific, source_phi, dropout, rng)};
}

Var pairwise_contrastive(Var anchor, Var pos, Var neg, double tau) {
  return ratio_contrastive(anchor, pos, neg, tau);
}

DecoderTerms decoder_loss(Var anchor_a, Var anchor_b, const TransformedFeatures& into_a,
                          const TransformedFeatures& into_b, double tau) {
  DecoderTerms t;
  t.a_shared_over_gnn = pairwise_contrastive(anchor_a, into_a.shared, into_a.gnn, tau);
  t.a_gnn_over_specific = pairwise_contrastive(anchor_a, into_a.gnn, into_a.specific, tau);
  t.b_shared_over_gnn = pairwise_contrastive(anchor_b, into_b.shared, into_b.gnn, tau);
  t.b_gnn_over_specific = pairwise_contrastive(anchor_b, into_b.gnn, into_b.specific, tau);
  t.total = diff::add(diff::add(t.a_shared_over_gnn, t.a_gnn_over_specific),
                      diff::add(t.b_shared_over_gnn, t.b_gnn_over_specific));
  return t;
}

}  // namespace dgcdr
