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

// Full dual-domain model: propagation, disentangling encoder, attention
// fusion, mapping-network decoder, BPR prediction loss and the weighted total
// objective, with the ablation toggles.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dgcdr/corpus.hpp"
#include "dgcdr/diff.hpp"
#include "dgcdr/gate.hpp"
#include "dgcdr/graph.hpp"
#include "dgcdr/propagation.hpp"

namespace dgcdr {

struct AblationFlags {
  bool gcn_only = false;  // predict from GNN embeddings, L = L_rec (+ L2)
  bool no_dec = false;    // drop the decoder loss
  bool no_enc = false;    // drop the encoder loss
  bool no_itdis = false;  // drop the item contrastive loss
  bool no_pers = false;   // concatenate [g|c|s] and project instead of attention fusion

  // Accepts "none" or a comma list of gcn, -dec, -enc, -itdis, -pers (the
  // leading dash and case are optional).
  static AblationFlags parse(const std::string& text);
  std::string to_string() const;
  bool any() const { return gcn_only || no_dec || no_enc || no_itdis || no_pers; }
  friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

struct TrainConfig {
  int dim = 64;
  int layers = 3;
  double lr = 1e-3;
  double l2 = 1e-4;
  double dropout = 0.1;
  double tau = 0.2;
  double lambda_en = 0.1;
  double lambda_de = 0.1;
  double lambda_item = 0.1;
  int batch_size = 4096;
  int patience = 10;
  int max_epochs = 300;
  int monitor_k = 10;
  std::uint64_t seed = 2025;
  AblationFlags ablation;

  // Structural sanity: positive sizes, lr > 0, dropout in [0,1), tau > 0,
  // non-negative weights, patience >= 1. Throws ConfigError.
  void validate() const;
  // Names of fields whose values lie outside the standard tuning grids.
  std::vector<std::string> off_grid_fields() const;
};

// Standard tuning grids.
namespace grids {
inline const std::vector<double> kLambda{0.01, 0.1, 1.0};
inline const std::vector<double> kL2{1e-3, 1e-4, 1e-5};
inline const std::vector<double> kDropout{0.1, 0.2, 0.3};
inline const std::vector<double> kTau{0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
inline const std::vector<double> kLearningRate{1e-3, 1e-4};
bool contains(const std::vector<double>& grid, double value);
}  // namespace grids

struct Triplet {
  int user = 0;  // dense user id
  int pos = 0;
  int neg = 0;
};

struct TripletBatch {
  Domain domain = Domain::A;
  std::vector<Triplet> entries;
};

// One optimisation step's worth of data: a set of overlap users and, per
// domain, triplets whose users are drawn from that set.
struct StepBatch {
  std::vector<int> users;
  std::array<std::vector<Triplet>, 2> triplets;
};

struct LossBreakdown {
  double rec = 0.0;
  double en = 0.0;
  double de = 0.0;
  double item = 0.0;
  double reg = 0.0;  // already multiplied by the L2 coefficient
  double total = 0.0;
  double lambda_en = 0.0;
  double lambda_de = 0.0;
  double lambda_item = 0.0;
  double lambda_reg = 0.0;

  double recompute_total() const {
    return rec + lambda_en * en + lambda_de * de + lambda_item * item + reg;
  }
};

struct LossTerms {
  diff::Var total;
  LossBreakdown values;
};

// Per-entity features for a set of rows of one domain.
struct EntityFeatures {
  diff::Var gnn;
  diff::Var shared;    // invalid under gcn_only
  diff::Var specific;  // invalid under gcn_only
  diff::Var weights;   // n x 2, invalid under gcn_only
  diff::Var fused;
};

// Dense per-user feature matrices for one domain (evaluation mode).
struct UserFeatureMatrices {
  diff::Matrix gnn, shared, specific, weights, fused;
};

using DomainGraphs = std::array<BipartiteGraph, 2>;

DomainGraphs build_graphs(const ProcessedDataset& ds);

// Dot product of fused embeddings.
double predict_score(std::span<const double> user, std::span<const double> item);

// mean over rows of -ln sigmoid(pos - neg); inputs are n x 1 score columns.
diff::Var bpr_loss(diff::Var pos_scores, diff::Var neg_scores);

class DgcdrModel {
 public:
  DgcdrModel(int n_users, std::array<int, 2> n_items, const TrainConfig& cfg, std::uint64_t seed);
  DgcdrModel(const DgcdrModel& other);
  DgcdrModel& operator=(const DgcdrModel& other);

  const TrainConfig& config() const { return cfg_; }
  diff::ParameterStore& store() { return store_; }
  const diff::ParameterStore& store() const { return store_; }
  int n_users() const { return n_users_; }
  int n_items(Domain d) const { return n_items_[index(d)]; }
  // Concatenated GNN width d(H+1).
  int width() const { return cfg_.dim * (cfg_.layers + 1); }

  GnnEmbedding propagate(diff::Tape& tape, const BipartiteGraph& graph, Domain d) const;
  // Encodes GNN rows of domain d. Dropout is active iff `rng` is non-null.
  EntityFeatures encode(diff::Tape& tape, Domain d, diff::Var gnn_rows, diff::Rng* rng) const;

  const GateNetwork& shared_gate(Domain d) const { return shared_gate_[index(d)]; }
  const GateNetwork& specific_gate(Domain d) const { return specific_gate_[index(d)]; }
  const GateNetwork& mapping(Domain d) const { return mapping_[index(d)]; }

  // Builds the full objective on a tape. `rng` drives dropout (null = off).
  LossTerms compute_loss(diff::Tape& tape, const DomainGraphs& graphs, const StepBatch& batch,
                         diff::Rng* rng) const;

  // users x items score matrix in evaluation mode.
  diff::Matrix score_matrix(const DomainGraphs& graphs, Domain d) const;
  std::array<diff::Matrix, 2> score_matrices(const DomainGraphs& graphs) const;
  UserFeatureMatrices user_features(const DomainGraphs& graphs, Domain d) const;

 private:
  void bind();

  TrainConfig cfg_;
  int n_users_ = 0;
  std::array<int, 2> n_items_{};
  // Forward passes are logically const but accumulate into parameter grads.
  mutable diff::ParameterStore store_;
  std::array<GateNetwork, 2> shared_gate_;
  std::array<GateNetwork, 2> specific_gate_;
  std::array<GateNetwork, 2> mapping_;
};

}  // namespace dgcdr
