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

#include "dgcdr/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "dgcdr/decoder.hpp"
#include "dgcdr/encoder.hpp"
#include "dgcdr/errors.hpp"

namespace dgcdr {

using diff::Matrix;
using diff::Tape;
using diff::Var;

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Per-group seed keyed by name, so ablations that drop a group leave the
// initialisation of every other group unchanged.
std::uint64_t group_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : name) h = (h ^ ch) * 0x100000001B3ULL;
  return splitmix(splitmix(seed) ^ h);
}

std::string prefix(Domain d) { return std::string(1, domain_letter(d)) + "."; }

Var gather(Var all, const std::vector<int>& rows) { return diff::gather_rows(all, rows); }

}  // namespace

// --- configuration -------------------------------------------------------------

AblationFlags AblationFlags::parse(const std::string& text) {
  AblationFlags flags;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    std::string t;
    for (char c : token) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    if (!t.empty() && t.front() == '-') t.erase(0, 1);
    if (t.empty() || t == "none" || t == "full") continue;
    if (t == "gcn" || t == "gcn_only") {
      flags.gcn_only = true;
    } else if (t == "dec" || t == "no_dec") {
      flags.no_dec = true;
    } else if (t == "enc" || t == "no_enc") {
      flags.no_enc = true;
    } else if (t == "itdis" || t == "no_itdis") {
      flags.no_itdis = true;
    } else if (t == "pers" || t == "no_pers") {
      flags.no_pers = true;
    } else {
      throw ConfigError("unknown ablation '" + token + "'");
    }
  }
  return flags;
}

std::string AblationFlags::to_string() const {
  std::vector<std::string> parts;
  if (gcn_only) parts.emplace_back("gcn");
  if (no_dec) parts.emplace_back("-dec");
  if (no_enc) parts.emplace_back("-enc");
  if (no_itdis) parts.emplace_back("-itdis");
  if (no_pers) parts.emplace_back("-pers");
  if (parts.empty()) return "none";
  std::string out = parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) out += "," + parts[k];
  return out;
}

bool grids::contains(const std::vector<double>& grid, double value) {
  return std::any_of(grid.begin(), grid.end(),
                     [&](double g) { return std::abs(g - value) <= 1e-12 * std::max(1.0, g); });
}

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (layers < 0) throw ConfigError("layers must be >= 0");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(l2 >= 0.0)) throw ConfigError("l2 must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0,1)");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(lambda_en >= 0.0 && lambda_de >= 0.0 && lambda_item >= 0.0)) {
    throw ConfigError("loss weights must be non-negative");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (monitor_k < 1) throw ConfigError("monitor_k must be >= 1");
}

std::vector<std::string> TrainConfig::off_grid_fields() const {
  std::vector<std::string> off;
  if (!grids::contains(grids::kLearningRate, lr)) off.emplace_back("lr");
  if (!grids::contains(grids::kL2, l2)) off.emplace_back("l2");
  if (!grids::contains(grids::kDropout, dropout)) off.emplace_back("dropout");
  if (!grids::contains(grids::kTau, tau)) off.emplace_back("tau");
  if (!grids::contains(grids::kLambda, lambda_en)) off.emplace_back("lambda_en");
  if (!grids::contains(grids::kLambda, lambda_de)) off.emplace_back("lambda_de");
  if (!grids::contains(grids::kLambda, lambda_item)) off.emplace_back("lambda_item");
  return off;
}

// --- helpers ------------------------------------------------------------------

DomainGraphs build_graphs(const ProcessedDataset& ds) {
  return {build_graph(ds, Domain::A), build_graph(ds, Domain::B)};
}

double predict_score(std::span<const double> user, std::span<const double> item) {
  if (user.size() != item.size()) {
    throw ShapeMismatch("predict_score", 1, static_cast<long>(user.size()), 1,
                        static_cast<long>(item.size()));
  }
  double s = 0.0;
  for (std::size_t k = 0; k < user.size(); ++k) s += user[k] * item[k];
  return s;
}

Var bpr_loss(Var pos_scores, Var neg_scores) {
  // -ln sigmoid(x) = softplus(-x)
  return diff::mean(diff::softplus(diff::sub(neg_scores, pos_scores)));
}

// --- model --------------------------------------------------------------------

DgcdrModel::DgcdrModel(int n_users, std::array<int, 2> n_items, const TrainConfig& cfg,
                       std::uint64_t seed)
    : cfg_(cfg), n_users_(n_users), n_items_(n_items) {
  cfg_.validate();
  if (n_users < 1 || n_items[0] < 1 || n_items[1] < 1) throw ZeroDimension();
  const int w = width();
  for (Domain d : kDomains) {
    const auto p = prefix(d);
    const auto seed_of = [&](const std::string& name) { return group_seed(seed, p + name); };
    store_.add(p + "user_emb", diff::xavier_init(n_users, cfg_.dim, seed_of("user_emb")));
    store_.add(p + "item_emb", diff::xavier_init(n_items[index(d)], cfg_.dim, seed_of("item_emb")));
    if (cfg_.ablation.gcn_only) continue;
    GateNetwork::create(store_, p + "gate_shared", w, seed_of("gate_shared"));
    GateNetwork::create(store_, p + "gate_specific", w, seed_of("gate_specific"));
    if (!cfg_.ablation.no_dec) GateNetwork::create(store_, p + "map", w, seed_of("map"));
    if (cfg_.ablation.no_pers) {
      store_.add(p + "fusion_proj", diff::xavier_init(3 * w, w, seed_of("fusion_proj")));
    }
  }
  bind();
}

DgcdrModel::DgcdrModel(const DgcdrModel& other)
    : cfg_(other.cfg_), n_users_(other.n_users_), n_items_(other.n_items_), store_(other.store_) {
  bind();
}

DgcdrModel& DgcdrModel::operator=(const DgcdrModel& other) {
  if (this != &other) {
    cfg_ = other.cfg_;
    n_users_ = other.n_users_;
    n_items_ = other.n_items_;
    store_ = other.store_;
    bind();
  }
  return *this;
}

void DgcdrModel::bind() {
  for (Domain d : kDomains) {
    const auto p = prefix(d);
    const auto k = index(d);
    shared_gate_[k] = {};
    specific_gate_[k] = {};
    mapping_[k] = {};
    if (store_.contains(p + "gate_shared.w1")) {
      shared_gate_[k] = GateNetwork::bind(store_, p + "gate_shared");
      specific_gate_[k] = GateNetwork::bind(store_, p + "gate_specific");
    }
    if (store_.contains(p + "map.w1")) mapping_[k] = GateNetwork::bind(store_, p + "map");
  }
}

GnnEmbedding DgcdrModel::propagate(Tape& tape, const BipartiteGraph& graph, Domain d) const {
  const auto p = prefix(d);
  return multi_layer_embed(graph, tape.param(store_.get(p + "user_emb")),
                           tape.param(store_.get(p + "item_emb")), cfg_.layers);
}

EntityFeatures DgcdrModel::encode(Tape& tape, Domain d, Var gnn_rows, diff::Rng* rng) const {
  EntityFeatures f;
  f.gnn = gnn_rows;
  if (cfg_.ablation.gcn_only) {
    f.fused = gnn_rows;
    return f;
  }
  const auto k = index(d);
  const auto parts =
      disentangle_project(tape, gnn_rows, shared_gate_[k], specific_gate_[k], cfg_.dropout, rng);
  f.shared = parts.shared;
  f.specific = parts.specific;
  f.weights = attention_weights(gnn_rows, f.shared, f.specific, static_cast<double>(width()));
  if (cfg_.ablation.no_pers) {
    const Var proj = tape.param(store_.get(prefix(d) + "fusion_proj"));
    f.fused = diff::matmul(diff::concat_cols({f.gnn, f.shared, f.specific}), proj);
  } else {
    f.fused = fuse_features(f.gnn, f.shared, f.specific, f.weights);
  }
  return f;
}

LossTerms DgcdrModel::compute_loss(Tape& tape, const DomainGraphs& graphs, const StepBatch& batch,
                                   diff::Rng* rng) const {
  if (batch.users.empty()) throw Error("step batch has no users");
  std::vector<int> slot(static_cast<std::size_t>(n_users_), -1);
  for (std::size_t s = 0; s < batch.users.size(); ++s) slot[batch.users[s]] = static_cast<int>(s);

  const auto& ab = cfg_.ablation;
  LossTerms out;
  LossBreakdown& v = out.values;
  v.lambda_en = (ab.gcn_only || ab.no_enc) ? 0.0 : cfg_.lambda_en;
  v.lambda_de = (ab.gcn_only || ab.no_dec) ? 0.0 : cfg_.lambda_de;
  v.lambda_item = (ab.gcn_only || ab.no_itdis) ? 0.0 : cfg_.lambda_item;
  v.lambda_reg = cfg_.l2;

  std::array<EntityFeatures, 2> users;
  std::array<EntityFeatures, 2> items;  // rows: positives then negatives
  std::array<std::vector<UserItem>, 2> pair_rows;
  std::optional<Var> rec;

  for (Domain d : kDomains) {
    const auto k = index(d);
    const GnnEmbedding g = propagate(tape, graphs[k], d);
    users[k] = encode(tape, d, gather(g.users, batch.users), rng);

    const auto& trip = batch.triplets[k];
    if (trip.empty()) continue;
    const auto n = static_cast<int>(trip.size());
    std::vector<int> user_slots, item_rows;
    user_slots.reserve(trip.size());
    item_rows.reserve(2 * trip.size());
    for (const auto& t : trip) {
      if (slot[t.user] < 0) throw Error("triplet user missing from step batch");
      user_slots.push_back(slot[t.user]);
      item_rows.push_back(t.pos);
    }
    for (const auto& t : trip) item_rows.push_back(t.neg);
    items[k] = encode(tape, d, gather(g.items, item_rows), rng);

    std::vector<int> pos_rows(trip.size()), neg_rows(trip.size());
    for (int r = 0; r < n; ++r) {
      pos_rows[r] = r;
      neg_rows[r] = n + r;
      pair_rows[k].push_back({user_slots[r], r});
    }
    const Var u = gather(users[k].fused, user_slots);
    const Var pos = diff::row_dot(u, gather(items[k].fused, pos_rows));
    const Var neg = diff::row_dot(u, gather(items[k].fused, neg_rows));
    const Var term = bpr_loss(pos, neg);
    rec = rec ? diff::add(*rec, term) : term;
  }
  if (!rec) throw Error("step batch has no triplets");

  Var total = *rec;
  v.rec = rec->scalar();
  const auto& ua = users[index(Domain::A)];
  const auto& ub = users[index(Domain::B)];

  // A zero weight skips the term entirely, so no dropout draws are consumed.
  if (v.lambda_en > 0.0) {
    const Var en = encoder_loss(ua.shared, ua.specific, ub.shared, ub.specific);
    v.en = en.scalar();
    total = diff::add(total, diff::scale(en, v.lambda_en));
  }
  if (v.lambda_item > 0.0) {
    std::optional<Var> item_total;
    for (Domain d : kDomains) {
      const auto k = index(d);
      if (pair_rows[k].empty()) continue;
      const Var term = item_contrastive_loss(pair_rows[k], users[k].specific,
                                             users[index(other(d))].specific, items[k].fused,
                                             cfg_.tau);
      item_total = item_total ? diff::add(*item_total, term) : term;
    }
    if (item_total) {
      v.item = item_total->scalar();
      total = diff::add(total, diff::scale(*item_total, v.lambda_item));
    }
  }
  if (v.lambda_de > 0.0) {
    // Features landing in A come from B through phi_B, and vice versa.
    const auto into_a = transform_from(tape, ub.gnn, ub.shared, ub.specific,
                                       mapping_[index(Domain::B)], cfg_.dropout, rng);
    const auto into_b = transform_from(tape, ua.gnn, ua.shared, ua.specific,
                                       mapping_[index(Domain::A)], cfg_.dropout, rng);
    const auto de = decoder_loss(ua.gnn, ub.gnn, into_a, into_b, cfg_.tau);
    v.de = de.total.scalar();
    total = diff::add(total, diff::scale(de.total, v.lambda_de));
  }
  const Var reg = diff::l2_penalty(tape, store_, cfg_.l2);
  v.reg = reg.scalar();
  total = diff::add(total, reg);
  v.total = total.scalar();
  out.total = total;
  return out;
}

Matrix DgcdrModel::score_matrix(const DomainGraphs& graphs, Domain d) const {
  Tape tape;
  const GnnEmbedding g = propagate(tape, graphs[index(d)], d);
  const auto u = encode(tape, d, g.users, nullptr);
  const auto i = encode(tape, d, g.items, nullptr);
  return u.fused.value() * i.fused.value().transpose();
}

std::array<Matrix, 2> DgcdrModel::score_matrices(const DomainGraphs& graphs) const {
  return {score_matrix(graphs, Domain::A), score_matrix(graphs, Domain::B)};
}

UserFeatureMatrices DgcdrModel::user_features(const DomainGraphs& graphs, Domain d) const {
  Tape tape;
  const GnnEmbedding g = propagate(tape, graphs[index(d)], d);
  const auto u = encode(tape, d, g.users, nullptr);
  UserFeatureMatrices m;
  m.gnn = u.gnn.value();
  m.fused = u.fused.value();
  if (u.shared.valid()) {
    m.shared = u.shared.value();
    m.specific = u.specific.value();
    m.weights = u.weights.value();
  }
  return m;
}

}  // namespace dgcdr
