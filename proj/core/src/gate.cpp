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

#include "dgcdr/gate.hpp"

#include "dgcdr/errors.hpp"

namespace dgcdr {

using diff::Matrix;
using diff::Var;

GateNetwork GateNetwork::create(diff::ParameterStore& store, const std::string& prefix, int width,
                                std::uint64_t seed) {
  GateNetwork net;
  net.w1_ = &store.add(prefix + ".w1", diff::xavier_init(width, width, seed));
  net.b1_ = &store.add(prefix + ".b1", Matrix::Zero(1, width));
  net.w2_ = &store.add(prefix + ".w2", diff::xavier_init(width, width, seed ^ 0x5bd1e995ULL));
  net.b2_ = &store.add(prefix + ".b2", Matrix::Zero(1, width));
  return net;
}

GateNetwork GateNetwork::bind(diff::ParameterStore& store, const std::string& prefix) {
  GateNetwork net;
  net.w1_ = &store.get(prefix + ".w1");
  net.b1_ = &store.get(prefix + ".b1");
  net.w2_ = &store.get(prefix + ".w2");
  net.b2_ = &store.get(prefix + ".b2");
  return net;
}

int GateNetwork::width() const { return static_cast<int>(w1_->value.rows()); }

Var GateNetwork::forward(diff::Tape& tape, Var x, double dropout, diff::Rng* rng) const {
  Var hidden = diff::relu(diff::add_row(diff::matmul(x, tape.param(*w1_)), tape.param(*b1_)));
  if (rng != nullptr && dropout > 0.0) {
    hidden = diff::apply_mask(hidden, dropout_mask(hidden.rows(), hidden.cols(), dropout, *rng));
  }
  return diff::sigmoid(diff::add_row(diff::matmul(hidden, tape.param(*w2_)), tape.param(*b2_)));
}

Var GateNetwork::gate(diff::Tape& tape, Var x, double dropout, diff::Rng* rng) const {
  return diff::hadamard(x, forward(tape, x, dropout, rng));
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, diff::Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("dropout rate must lie in [0,1)");
  std::bernoulli_distribution keep(1.0 - p);
  const double scale = 1.0 / (1.0 - p);
  Matrix mask(rows, cols);
  for (Eigen::Index k = 0; k < mask.size(); ++k) mask.data()[k] = keep(rng) ? scale : 0.0;
  return mask;
}

}  // namespace dgcdr
