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

#include <cstdint>
#include <string>

#include "dgcdr/diff.hpp"

namespace dgcdr {

// Two-layer perceptron with a sigmoid head, used both as the disentangling
// gate and as the cross-domain mapping network:
//   linear(D->D) -> ReLU -> dropout -> linear(D->D) -> sigmoid
class GateNetwork {
 public:
  GateNetwork() = default;

  // Registers "<prefix>.w1", ".b1", ".w2", ".b2" in the store. Weights are
  // Xavier-normal, biases zero.
  static GateNetwork create(diff::ParameterStore& store, const std::string& prefix, int width,
                            std::uint64_t seed);
  // Rebinds to parameters already present in a store (e.g. a copied store).
  static GateNetwork bind(diff::ParameterStore& store, const std::string& prefix);

  // Gate values in (0,1). Dropout is applied only when `rng` is non-null.
  diff::Var forward(diff::Tape& tape, diff::Var x, double dropout, diff::Rng* rng) const;

  // x * forward(x).
  diff::Var gate(diff::Tape& tape, diff::Var x, double dropout, diff::Rng* rng) const;

  int width() const;
  diff::Parameter& output_weight() const { return *w2_; }
  diff::Parameter& output_bias() const { return *b2_; }

 private:
  diff::Parameter* w1_ = nullptr;
  diff::Parameter* b1_ = nullptr;
  diff::Parameter* w2_ = nullptr;
  diff::Parameter* b2_ = nullptr;
};

// Inverted-dropout mask: entries 0 with probability p, else 1/(1-p).
diff::Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, diff::Rng& rng);

}  // namespace dgcdr
