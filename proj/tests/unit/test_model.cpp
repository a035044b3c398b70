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

#include <doctest.h>

#include <cmath>

#include "dgcdr/encoder.hpp"
#include "dgcdr/errors.hpp"
#include "dgcdr/model.hpp"
#include "dgcdr/train.hpp"
#include "oracles.hpp"

using namespace dgcdr;
using namespace dgcdr::diff;

namespace {

struct Fixture {
  ProcessedDataset ds = oracle::toy_dataset(8, 12, 21, 0.45);
  DomainGraphs graphs = build_graphs(ds);

  StepBatch batch(std::uint64_t seed = 1) const {
    const std::array<NegativeSampler, 2> samplers{NegativeSampler(ds, Domain::A),
                                                  NegativeSampler(ds, Domain::B)};
    Rng rng(seed);
    return epoch_batches(ds, 1 << 20, samplers, rng).front();
  }

  DgcdrModel model(TrainConfig cfg) const {
    return DgcdrModel(ds.n_users(), {ds.n_items(Domain::A), ds.n_items(Domain::B)}, cfg, cfg.seed);
  }
};

TrainConfig small() {
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.layers = 2;
  cfg.dropout = 0.0;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("score is the inner product") {
  const std::vector<double> u{1, 0}, i{0, 1}, ones{1, 1}, scaled{0, 3};
  CHECK(predict_score(u, i) == 0.0);
  CHECK(predict_score(ones, ones) == 2.0);
  CHECK(predict_score(ones, scaled) == 3.0 * predict_score(ones, i));
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(predict_score(u, three), ShapeMismatch);
}

TEST_CASE("BPR closed forms") {
  Tape t;
  const auto col = [&](double v) { return t.constant(Matrix::Constant(1, 1, v)); };
  CHECK(std::abs(bpr_loss(col(0.4), col(0.4)).scalar() - std::log(2.0)) < 1e-9);
  CHECK(bpr_loss(col(1.0), col(0.0)).scalar() == doctest::Approx(std::log1p(std::exp(-1.0))));
  CHECK(bpr_loss(col(60.0), col(0.0)).scalar() < 1e-20);
}

TEST_CASE("ablation flags parse and print") {
  CHECK_FALSE(AblationFlags::parse("none").any());
  const auto f = AblationFlags::parse("GCN, -dec,itdis");
  CHECK(f.gcn_only);
  CHECK(f.no_dec);
  CHECK(f.no_itdis);
  CHECK_FALSE(f.no_enc);
  CHECK(AblationFlags::parse(f.to_string()) == f);
  CHECK_THROWS_AS(AblationFlags::parse("-foo"), ConfigError);
}

TEST_CASE("config validation and grid membership") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.off_grid_fields().empty());
  cfg.tau = 0.12;
  cfg.lr = 5e-3;
  CHECK(cfg.off_grid_fields() == std::vector<std::string>{"lr", "tau"});
  cfg.patience = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.dropout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("breakdown total is recomputable from its parts") {
  LossBreakdown b;
  b.rec = b.en = b.de = b.item = 1.0;
  b.lambda_en = b.lambda_de = b.lambda_item = 0.1;
  CHECK(b.recompute_total() == doctest::Approx(1.3).epsilon(1e-12));

  const Fixture fx;
  auto cfg = small();
  cfg.dropout = 0.1;
  const auto model = fx.model(cfg);
  Tape t;
  Rng rng(3);
  const auto terms = model.compute_loss(t, fx.graphs, fx.batch(), &rng);
  CHECK(std::abs(terms.values.recompute_total() - terms.values.total) < 1e-9);
  CHECK(terms.values.en > 0.0);
  CHECK(terms.values.de > 0.0);
  CHECK(terms.values.item > 0.0);
  CHECK(terms.values.reg > 0.0);
}

TEST_CASE("zero weights reduce the objective to the prediction loss") {
  const Fixture fx;
  auto cfg = small();
  cfg.lambda_en = cfg.lambda_de = cfg.lambda_item = cfg.l2 = 0.0;
  const auto model = fx.model(cfg);
  Tape t;
  const auto terms = model.compute_loss(t, fx.graphs, fx.batch(), nullptr);
  CHECK(terms.values.total == terms.values.rec);
}

TEST_CASE("gcn_only keeps only tables and the rec and reg terms") {
  const Fixture fx;
  auto cfg = small();
  cfg.ablation.gcn_only = true;
  const auto model = fx.model(cfg);
  CHECK(model.store().size() == 4);
  Tape t;
  const auto terms = model.compute_loss(t, fx.graphs, fx.batch(), nullptr);
  CHECK(terms.values.en == 0.0);
  CHECK(terms.values.de == 0.0);
  CHECK(terms.values.item == 0.0);
  CHECK(terms.values.total == doctest::Approx(terms.values.rec + terms.values.reg).epsilon(1e-12));
  // Scores are plain GNN dot products.
  Tape g;
  const auto emb = model.propagate(g, fx.graphs[0], Domain::A);
  const Matrix direct = emb.users.value() * emb.items.value().transpose();
  CHECK((model.score_matrix(fx.graphs, Domain::A) - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ablations register only the parameters they use") {
  const Fixture fx;
  auto cfg = small();
  CHECK(fx.model(cfg).store().contains("A.map.w1"));
  cfg.ablation.no_dec = true;
  CHECK_FALSE(fx.model(cfg).store().contains("B.map.w1"));
  cfg.ablation.no_pers = true;
  const auto pers = fx.model(cfg);
  CHECK(pers.store().get("A.fusion_proj").value.rows() == 3 * pers.width());
  CHECK(pers.score_matrix(fx.graphs, Domain::B).rows() == fx.ds.n_users());
}

TEST_CASE("full objective gradient check on a toy instance") {
  const Fixture fx;
  for (const char* ablation : {"none", "-pers", "gcn"}) {
    auto cfg = small();
    cfg.ablation = AblationFlags::parse(ablation);
    auto model = fx.model(cfg);
    const StepBatch batch = fx.batch();
    const auto loss = [&](Tape& t) { return model.compute_loss(t, fx.graphs, batch, nullptr).total; };
    const auto r = grad_check(loss, model.store());
    CHECK_MESSAGE(r.max_rel_error < 1e-4, ablation << " worst " << r.worst_parameter);
    std::size_t entries = 0;
    for (std::size_t k = 0; k < model.store().size(); ++k) entries += model.store().at(k).value.size();
    // Smaller stores are checked exhaustively.
    CHECK(r.entries_checked == std::min<std::size_t>(200, entries));
  }
}

TEST_CASE("copies evaluate identically and independently") {
  const Fixture fx;
  auto model = fx.model(small());
  DgcdrModel copy = model;
  CHECK(copy.score_matrix(fx.graphs, Domain::A) == model.score_matrix(fx.graphs, Domain::A));
  copy.store().get("A.gate_shared.b2").value.array() += 1.0;
  CHECK(copy.score_matrix(fx.graphs, Domain::A) != model.score_matrix(fx.graphs, Domain::A));
}

TEST_CASE("evaluation features expose a weight simplex") {
  const Fixture fx;
  const auto f = fx.model(small()).user_features(fx.graphs, Domain::B);
  CHECK(f.weights.cols() == 2);
  CHECK((f.weights.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);
  CHECK(f.fused.cols() == f.gnn.cols());
}
