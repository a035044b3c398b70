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

// Minimal tape-based reverse-mode differentiation over dense row-major
// float64 matrices, plus the parameter store, Xavier initialisation, Adam,
// the L2 penalty, checkpoints and a finite-difference gradient checker.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace dgcdr::diff {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Rng = std::mt19937_64;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix adam_m;
  Matrix adam_v;
};

class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore& other);
  ParameterStore& operator=(const ParameterStore& other);
  ParameterStore(ParameterStore&&) noexcept = default;
  ParameterStore& operator=(ParameterStore&&) noexcept = default;

  // Adds a parameter; names must be unique. The returned reference stays
  // valid for the lifetime of the store.
  Parameter& add(const std::string& name, Matrix value);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.contains(name); }

  std::size_t size() const { return params_.size(); }
  std::size_t num_entries() const;
  Parameter& at(std::size_t k) { return *params_[k]; }
  const Parameter& at(std::size_t k) const { return *params_[k]; }

  void zero_grad();
  // Copies values (not moments) from a store with identical layout.
  void copy_values_from(const ParameterStore& other);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

class Tape;

// Handle to a node on a tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  double scalar() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  // Receives the tape and the id of the node whose gradient is ready.
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  // Leaf bound to a parameter; cached so every use shares one node. The
  // backward pass accumulates the node gradient into Parameter::grad.
  Var param(Parameter& p);
  // Records an op output. The node requires grad iff any input does.
  Var record(Matrix value, std::initializer_list<Var> inputs, BackwardFn backward);
  Var record(Matrix value, const std::vector<Var>& inputs, BackwardFn backward);

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  const Matrix& value(Var v) const { return nodes_[v.id()].value; }
  // Gradient accumulated so far; an empty matrix means "zero".
  const Matrix& grad(std::size_t id) const { return nodes_[id].grad; }
  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }

  template <class Expr>
  void accumulate(Var v, const Expr& g) {
    auto& node = nodes_[v.id()];
    if (!node.requires_grad) return;
    if (node.grad.size() == 0) {
      node.grad = g;
    } else {
      node.grad += g;
    }
  }

  // Seeds d(root)/d(root) = 1 and runs the recorded backward rules in
  // reverse order. Root must be 1x1.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };
  Var push(Node node);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
};

// ---------------------------------------------------------------------------
// Differentiable primitives. Every op throws ShapeMismatch on incompatible
// operands.

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double c);
// a (n x c) plus a broadcast 1 x c row.
Var add_row(Var a, Var row);
Var relu(Var a);
Var sigmoid(Var a);
// Multiplies by a fixed mask (entries 0 or 1/(1-p) for inverted dropout).
Var apply_mask(Var a, Matrix mask);
Var concat_cols(const std::vector<Var>& parts);
Var gather_rows(Var a, std::span<const int> rows);
Var column(Var a, Eigen::Index j);
// Row-wise inner product: n x c, n x c -> n x 1.
Var row_dot(Var a, Var b);
// Scales row r of `a` by w(r,0): n x 1, n x c -> n x c.
Var scale_rows(Var w, Var a);
Var softmax_rows(Var a);
Var log(Var a);
Var exp(Var a);
Var square(Var a);
// Numerically stable log(1 + e^x).
Var softplus(Var a);
// Row-wise Euclidean norm, n x c -> n x 1.
Var l2_norm_rows(Var a);
// Row-wise cosine similarity, n x 1. Throws ZeroVector on a zero row.
Var cosine_rows(Var a, Var b);
Var sum(Var a);
Var mean(Var a);
Var sum_squares(Var a);

// ---------------------------------------------------------------------------

// i.i.d. N(0, 2/(rows+cols)); deterministic per seed.
Matrix xavier_init(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step_count = 0;

  void validate() const;
};

// Bias-corrected Adam update of every parameter, then zeroes gradients.
// Throws NonFiniteGradient before touching any parameter.
void adam_step(ParameterStore& store, AdamState& state);

// lambda * sum of squared entries over all parameters in the store.
Var l2_penalty(Tape& tape, ParameterStore& store, double lambda);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t entries_checked = 0;
  std::string worst_parameter;
};

struct GradCheckOptions {
  double eps = 1e-5;
  std::size_t samples = 200;
  std::uint64_t seed = 7;
  // Denominator floor for the relative error |a - n| / max(|a|, |n|, floor).
  double abs_floor = 1e-6;
  // When non-empty, only these parameters are sampled.
  std::vector<std::string> only;
};

using LossFn = std::function<Var(Tape&)>;

// Central finite differences on sampled parameter entries versus the
// analytic gradient of one backward pass.
GradCheckResult grad_check(const LossFn& loss_fn, ParameterStore& store,
                           const GradCheckOptions& options = {});

// Checkpoint: per parameter a text header line "name rows cols" followed by
// rows*cols little-endian float64 values in row-major order.
void save_checkpoint(const ParameterStore& store, const std::filesystem::path& path);
// Loads into an existing store; names and shapes must match.
void load_checkpoint(ParameterStore& store, const std::filesystem::path& path);

}  // namespace dgcdr::diff
