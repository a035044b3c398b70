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

#include "dgcdr/diff.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dgcdr/errors.hpp"

namespace dgcdr::diff {
namespace {

void require_same_shape(const char* op, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch(op, a.rows(), a.cols(), b.rows(), b.cols());
  }
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

// --- ParameterStore ---------------------------------------------------------

ParameterStore::ParameterStore(const ParameterStore& other) : index_(other.index_) {
  params_.reserve(other.params_.size());
  for (const auto& p : other.params_) params_.push_back(std::make_unique<Parameter>(*p));
}

ParameterStore& ParameterStore::operator=(const ParameterStore& other) {
  if (this != &other) {
    ParameterStore copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Parameter& ParameterStore::add(const std::string& name, Matrix value) {
  if (index_.contains(name)) throw Error("duplicate parameter name '" + name + "'");
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->grad = Matrix::Zero(value.rows(), value.cols());
  p->adam_m = Matrix::Zero(value.rows(), value.cols());
  p->adam_v = Matrix::Zero(value.rows(), value.cols());
  p->value = std::move(value);
  index_.emplace(name, params_.size());
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParameterStore::get(const std::string& name) {
  const auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown parameter '" + name + "'");
  return *params_[it->second];
}

const Parameter& ParameterStore::get(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown parameter '" + name + "'");
  return *params_[it->second];
}

std::size_t ParameterStore::num_entries() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

void ParameterStore::copy_values_from(const ParameterStore& other) {
  if (other.size() != size()) throw Error("parameter layouts differ");
  for (std::size_t k = 0; k < params_.size(); ++k) {
    require_same_shape("copy_values_from", params_[k]->value, other.params_[k]->value);
    params_[k]->value = other.params_[k]->value;
  }
}

// --- Tape -------------------------------------------------------------------

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  const auto& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ShapeMismatch("scalar", v.rows(), v.cols(), 1, 1);
  return v(0, 0);
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::param(Parameter& p) {
  if (const auto it = param_nodes_.find(&p); it != param_nodes_.end()) {
    return Var(this, it->second);
  }
  Node n;
  n.value = p.value;
  n.param = &p;
  n.requires_grad = true;
  Var v = push(std::move(n));
  param_nodes_.emplace(&p, v.id());
  return v;
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const Var& in : inputs) n.requires_grad |= nodes_[in.id()].requires_grad;
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

Var Tape::record(Matrix value, const std::vector<Var>& inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const Var& in : inputs) n.requires_grad |= nodes_[in.id()].requires_grad;
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

void Tape::backward(Var root) {
  const auto& rv = nodes_[root.id()].value;
  if (rv.rows() != 1 || rv.cols() != 1) {
    throw ShapeMismatch("backward root", rv.rows(), rv.cols(), 1, 1);
  }
  for (auto& n : nodes_) n.grad.resize(0, 0);
  if (!nodes_[root.id()].requires_grad) return;
  nodes_[root.id()].grad = Matrix::Ones(1, 1);
  for (std::size_t id = root.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, id);
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

// --- Primitives ---------------------------------------------------------------

Var matmul(Var a, Var b) {
  Tape& t = *a.tape();
  if (a.cols() != b.rows()) throw ShapeMismatch("matmul", a.rows(), a.cols(), b.rows(), b.cols());
  Matrix out = a.value() * b.value();
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(a)) tp.accumulate(a, g * b.value().transpose());
    if (tp.requires_grad(b)) tp.accumulate(b, a.value().transpose() * g);
  });
}

Var add(Var a, Var b) {
  require_same_shape("add", a.value(), b.value());
  Matrix out = a.value() + b.value();
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& tp, std::size_t self) {
    tp.accumulate(a, tp.grad(self));
    tp.accumulate(b, tp.grad(self));
  });
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a.value(), b.value());
  Matrix out = a.value() - b.value();
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& tp, std::size_t self) {
    tp.accumulate(a, tp.grad(self));
    tp.accumulate(b, -tp.grad(self));
  });
}

Var hadamard(Var a, Var b) {
  require_same_shape("hadamard", a.value(), b.value());
  Matrix out = a.value().cwiseProduct(b.value());
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(a)) tp.accumulate(a, g.cwiseProduct(b.value()));
    if (tp.requires_grad(b)) tp.accumulate(b, g.cwiseProduct(a.value()));
  });
}

Var scale(Var a, double factor) {
  Matrix out = a.value() * factor;
  return a.tape()->record(std::move(out), {a}, [a, factor](Tape& tp, std::size_t self) {
    tp.accumulate(a, tp.grad(self) * factor);
  });
}

Var add_scalar(Var a, double c) {
  Matrix out = a.value().array() + c;
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, std::size_t self) {
    tp.accumulate(a, tp.grad(self));
  });
}

Var add_row(Var a, Var row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ShapeMismatch("add_row", a.rows(), a.cols(), row.rows(), row.cols());
  }
  Matrix out = a.value().rowwise() + row.value().row(0);
  return a.tape()->record(std::move(out), {a, row}, [a, row](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    tp.accumulate(a, g);
    if (tp.requires_grad(row)) tp.accumulate(row, g.colwise().sum());
  });
}

Var relu(Var a) {
  Matrix out = a.value().cwiseMax(0.0);
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, std::size_t self) {
    const Matrix mask = (a.value().array() > 0.0).cast<double>().matrix();
    tp.accumulate(a, tp.grad(self).cwiseProduct(mask));
  });
}

Var sigmoid(Var a) {
  Matrix out = a.value().unaryExpr([](double x) { return stable_sigmoid(x); });
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, std::size_t self) {
    const Matrix& y = tp.value(self);
    tp.accumulate(a, tp.grad(self).cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix())));
  });
}

Var apply_mask(Var a, Matrix mask) {
  require_same_shape("apply_mask", a.value(), mask);
  Matrix out = a.value().cwiseProduct(mask);
  return a.tape()->record(std::move(out), {a},
                          [a, mask = std::move(mask)](Tape& tp, std::size_t self) {
                            tp.accumulate(a, tp.grad(self).cwiseProduct(mask));
                          });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw Error("concat_cols: no inputs");
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw ShapeMismatch("concat_cols", rows, 0, p.rows(), p.cols());
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index offset = 0;
  for (const Var& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  return parts.front().tape()->record(std::move(out), parts,
                                      [parts](Tape& tp, std::size_t self) {
                                        const Matrix& g = tp.grad(self);
                                        Eigen::Index off = 0;
                                        for (const Var& p : parts) {
                                          if (tp.requires_grad(p)) {
                                            tp.accumulate(p, g.middleCols(off, p.cols()));
                                          }
                                          off += p.cols();
                                        }
                                      });
}

Var gather_rows(Var a, std::span<const int> rows) {
  std::vector<int> idx(rows.begin(), rows.end());
  Matrix out(static_cast<Eigen::Index>(idx.size()), a.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= a.rows()) {
      throw ShapeMismatch("gather_rows", a.rows(), a.cols(), idx[k], 0);
    }
    out.row(static_cast<Eigen::Index>(k)) = a.value().row(idx[k]);
  }
  return a.tape()->record(std::move(out), {a},
                          [a, idx = std::move(idx)](Tape& tp, std::size_t self) {
                            const Matrix& g = tp.grad(self);
                            Matrix scatter = Matrix::Zero(a.rows(), a.cols());
                            for (std::size_t k = 0; k < idx.size(); ++k) {
                              scatter.row(idx[k]) += g.row(static_cast<Eigen::Index>(k));
                            }
                            tp.accumulate(a, scatter);
                          });
}

Var column(Var a, Eigen::Index j) {
  if (j < 0 || j >= a.cols()) throw ShapeMismatch("column", a.rows(), a.cols(), 0, j);
  Matrix out = a.value().col(j);
  return a.tape()->record(std::move(out), {a}, [a, j](Tape& tp, std::size_t self) {
    Matrix g = Matrix::Zero(a.rows(), a.cols());
    g.col(j) = tp.grad(self).col(0);
    tp.accumulate(a, g);
  });
}

Var row_dot(Var a, Var b) {
  require_same_shape("row_dot", a.value(), b.value());
  Matrix out = a.value().cwiseProduct(b.value()).rowwise().sum();
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(a)) tp.accumulate(a, (b.value().array().colwise() * g.col(0).array()).matrix());
    if (tp.requires_grad(b)) tp.accumulate(b, (a.value().array().colwise() * g.col(0).array()).matrix());
  });
}

Var scale_rows(Var w, Var a) {
  if (w.cols() != 1 || w.rows() != a.rows()) {
    throw ShapeMismatch("scale_rows", w.rows(), w.cols(), a.rows(), a.cols());
  }
  Matrix out = (a.value().array().colwise() * w.value().col(0).array()).matrix();
  return a.tape()->record(std::move(out), {w, a}, [w, a](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(w)) tp.accumulate(w, g.cwiseProduct(a.value()).rowwise().sum());
    if (tp.requires_grad(a)) tp.accumulate(a, (g.array().colwise() * w.value().col(0).array()).matrix());
  });
}

Var softmax_rows(Var a) {
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    out.row(r) = (x.row(r).array() - m).exp();
    out.row(r) /= out.row(r).sum();
  }
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, std::size_t self) {
    const Matrix& y = tp.value(self);
    const Matrix& g = tp.grad(self);
    const Eigen::VectorXd inner = g.cwiseProduct(y).rowwise().sum();
    Matrix dx = y.cwiseProduct((g.array().colwise() - inner.array()).matrix());
    tp.accumulate(a, dx);
  });
}

Var log(Var a) {
  Matrix out = a.value().array().log().matrix();
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, std::size_t self) {
    tp.accumulate(a, tp.grad(self).cwiseQuotient(a.value()));
  });
}

Var exp(Var a) {
  Matrix out = a.value().array().exp().matrix();
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, std::size_t self) {
    tp.accumulate(a, tp.grad(self).cwiseProduct(tp.value(self)));
  });
}

Var square(Var a) {
  Matrix out = a.value().cwiseAbs2();
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, std::size_t self) {
    tp.accumulate(a, 2.0 * tp.grad(self).cwiseProduct(a.value()));
  });
}

Var softplus(Var a) {
  Matrix out = a.value().unaryExpr([](double x) { return stable_softplus(x); });
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, std::size_t self) {
    const Matrix s = a.value().unaryExpr([](double x) { return stable_sigmoid(x); });
    tp.accumulate(a, tp.grad(self).cwiseProduct(s));
  });
}

Var l2_norm_rows(Var a) {
  Matrix out = a.value().rowwise().norm();
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, std::size_t self) {
    const Matrix& n = tp.value(self);
    const Matrix& g = tp.grad(self);
    Matrix dx = Matrix::Zero(a.rows(), a.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      if (n(r, 0) > 0.0) dx.row(r) = a.value().row(r) * (g(r, 0) / n(r, 0));
    }
    tp.accumulate(a, dx);
  });
}

Var cosine_rows(Var a, Var b) {
  require_same_shape("cosine_rows", a.value(), b.value());
  const Eigen::VectorXd na = a.value().rowwise().norm();
  const Eigen::VectorXd nb = b.value().rowwise().norm();
  for (Eigen::Index r = 0; r < na.size(); ++r) {
    if (na(r) == 0.0 || nb(r) == 0.0) {
      throw ZeroVector("cosine of a zero vector at row " + std::to_string(r));
    }
  }
  const Eigen::VectorXd dot = a.value().cwiseProduct(b.value()).rowwise().sum();
  Matrix out = dot.cwiseQuotient(na.cwiseProduct(nb));
  return a.tape()->record(std::move(out), {a, b}, [a, b, na, nb](Tape& tp, std::size_t self) {
    const Matrix& c = tp.value(self);
    const Matrix& g = tp.grad(self);
    const Matrix& av = a.value();
    const Matrix& bv = b.value();
    if (tp.requires_grad(a)) {
      Matrix da(av.rows(), av.cols());
      for (Eigen::Index r = 0; r < av.rows(); ++r) {
        da.row(r) = g(r, 0) * (bv.row(r) / (na(r) * nb(r)) - c(r, 0) * av.row(r) / (na(r) * na(r)));
      }
      tp.accumulate(a, da);
    }
    if (tp.requires_grad(b)) {
      Matrix db(bv.rows(), bv.cols());
      for (Eigen::Index r = 0; r < bv.rows(); ++r) {
        db.row(r) = g(r, 0) * (av.row(r) / (na(r) * nb(r)) - c(r, 0) * bv.row(r) / (nb(r) * nb(r)));
      }
      tp.accumulate(b, db);
    }
  });
}

Var sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, std::size_t self) {
    tp.accumulate(a, Matrix::Constant(a.rows(), a.cols(), tp.grad(self)(0, 0)));
  });
}

Var mean(Var a) {
  const auto n = static_cast<double>(a.value().size());
  if (n == 0) throw ShapeMismatch("mean", a.rows(), a.cols(), 1, 1);
  Matrix out(1, 1);
  out(0, 0) = a.value().sum() / n;
  return a.tape()->record(std::move(out), {a}, [a, n](Tape& tp, std::size_t self) {
    tp.accumulate(a, Matrix::Constant(a.rows(), a.cols(), tp.grad(self)(0, 0) / n));
  });
}

Var sum_squares(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().squaredNorm();
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, std::size_t self) {
    tp.accumulate(a, (2.0 * tp.grad(self)(0, 0)) * a.value());
  });
}

// --- Initialisation and optimisation -----------------------------------------

Matrix xavier_init(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw ZeroDimension();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(rows + cols)));
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

void AdamState::validate() const {
  if (!(lr > 0.0)) throw ConfigError("Adam learning rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in (0,1)");
  }
}

void adam_step(ParameterStore& store, AdamState& state) {
  for (std::size_t k = 0; k < store.size(); ++k) {
    if (!store.at(k).grad.allFinite()) throw NonFiniteGradient(store.at(k).name);
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < store.size(); ++k) {
    Parameter& p = store.at(k);
    p.adam_m = state.beta1 * p.adam_m + (1.0 - state.beta1) * p.grad;
    p.adam_v = state.beta2 * p.adam_v + (1.0 - state.beta2) * p.grad.cwiseAbs2();
    const auto m_hat = p.adam_m.array() / c1;
    const auto v_hat = p.adam_v.array() / c2;
    p.value.array() -= state.lr * m_hat / (v_hat.sqrt() + state.eps);
  }
  store.zero_grad();
}

Var l2_penalty(Tape& tape, ParameterStore& store, double lambda) {
  if (lambda < 0.0) throw ConfigError("L2 coefficient must be non-negative");
  if (lambda == 0.0 || store.size() == 0) return tape.constant(Matrix::Zero(1, 1));
  Var total = sum_squares(tape.param(store.at(0)));
  for (std::size_t k = 1; k < store.size(); ++k) {
    total = add(total, sum_squares(tape.param(store.at(k))));
  }
  return scale(total, lambda);
}

GradCheckResult grad_check(const LossFn& loss_fn, ParameterStore& store,
                           const GradCheckOptions& options) {
  store.zero_grad();
  {
    Tape tape;
    Var loss = loss_fn(tape);
    tape.backward(loss);
  }
  std::vector<Matrix> analytic;
  analytic.reserve(store.size());
  for (std::size_t k = 0; k < store.size(); ++k) analytic.push_back(store.at(k).grad);
  store.zero_grad();

  std::vector<std::size_t> eligible;
  std::vector<std::size_t> cumulative;
  std::size_t total = 0;
  for (std::size_t k = 0; k < store.size(); ++k) {
    const auto& name = store.at(k).name;
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), name) == options.only.end()) {
      continue;
    }
    eligible.push_back(k);
    total += static_cast<std::size_t>(store.at(k).value.size());
    cumulative.push_back(total);
  }

  auto evaluate = [&]() {
    Tape tape;
    return loss_fn(tape).scalar();
  };

  GradCheckResult result;
  if (total == 0) return result;
  Rng rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  const std::size_t n_samples = std::min(options.samples, total);
  std::vector<std::size_t> flat_indices;
  if (n_samples == total) {
    for (std::size_t f = 0; f < total; ++f) flat_indices.push_back(f);
  } else {
    for (std::size_t s = 0; s < n_samples; ++s) flat_indices.push_back(pick(rng));
  }

  for (const std::size_t flat : flat_indices) {
    const auto slot = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), flat) - cumulative.begin());
    const std::size_t k = eligible[slot];
    const std::size_t offset = flat - (slot == 0 ? 0 : cumulative[slot - 1]);
    Parameter& p = store.at(k);
    double& entry = p.value.data()[offset];
    const double original = entry;
    entry = original + options.eps;
    const double f_plus = evaluate();
    entry = original - options.eps;
    const double f_minus = evaluate();
    entry = original;
    const double numeric = (f_plus - f_minus) / (2.0 * options.eps);
    const double exact = analytic[k].data()[offset];
    const double denom = std::max({std::abs(exact), std::abs(numeric), options.abs_floor});
    const double rel = std::abs(exact - numeric) / denom;
    ++result.entries_checked;
    if (rel > result.max_rel_error || result.worst_parameter.empty()) {
      result.max_rel_error = rel;
      result.worst_parameter = p.name;
    }
  }
  return result;
}

// --- Checkpoints ----------------------------------------------------------------

namespace {

void write_le_double(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xFFu);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double read_le_double(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw DataError("checkpoint truncated");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_checkpoint(const ParameterStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  for (std::size_t k = 0; k < store.size(); ++k) {
    const Parameter& p = store.at(k);
    out << p.name << ' ' << p.value.rows() << ' ' << p.value.cols() << '\n';
    for (Eigen::Index i = 0; i < p.value.size(); ++i) write_le_double(out, p.value.data()[i]);
  }
}

void load_checkpoint(ParameterStore& store, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::size_t loaded = 0;
  std::string header;
  while (std::getline(in, header)) {
    if (header.empty()) continue;
    std::istringstream hs(header);
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(hs >> name >> rows >> cols)) throw DataError("bad checkpoint header: " + header);
    if (!store.contains(name)) throw DataError("checkpoint has unknown parameter " + name);
    Parameter& p = store.get(name);
    if (p.value.rows() != rows || p.value.cols() != cols) {
      throw ShapeMismatch("load_checkpoint " + name, p.value.rows(), p.value.cols(), rows, cols);
    }
    for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = read_le_double(in);
    ++loaded;
  }
  if (loaded != store.size()) {
    throw DataError("checkpoint " + path.string() + " holds " + std::to_string(loaded) +
                    " of " + std::to_string(store.size()) + " parameters");
  }
}

}  // namespace dgcdr::diff
