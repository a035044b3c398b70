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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dgcdr/errors.hpp"
#include "dgcdr/synth.hpp"
#include "dgcdr_cli/commands.hpp"
#include "dgcdr_cli/exporters.hpp"
#include "oracles.hpp"

using namespace dgcdr;
using namespace dgcdr::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("DGCDR_TEST_TMP");
  const auto dir = fs::path(env ? env : "/tmp/dgcdr_cli_tests") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

// Synthetic raw files plus a quick config pointing at them.
ExperimentConfig synthetic_run(const fs::path& dir, int users = 20, int items = 24) {
  SynthSpec spec;
  spec.n_users = users;
  spec.n_items = {items, items};
  spec.density = 0.3;
  spec.n_core = 3;
  spec.seed = 2;
  write_synth(generate(spec), dir / "a.tsv", dir / "b.tsv");
  ExperimentConfig cfg;
  cfg.domain_a = dir / "a.tsv";
  cfg.domain_b = dir / "b.tsv";
  cfg.dataset_dir = dir / "ds";
  cfg.n_core = 3;
  cfg.split.seed = 1;
  cfg.train.dim = 4;
  cfg.train.layers = 1;
  cfg.train.max_epochs = 2;
  cfg.train.batch_size = 8;
  cfg.seeds = {1};
  cfg.out = dir / "run";
  return cfg;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "dgcdr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("config parsing is lossless") {
  const std::string text =
      "[data]\ndomain_a = raw/a.tsv\ndomain_b = raw/b.tsv\nn_core = 10\n"
      "[split]\ntarget = B\nseed = 4\n"
      "[train]\ndim = 32\ntau = 0.15\nlambda_en = 1\nablation = -dec,-pers\nseeds = 1,2,3\n"
      "[eval]\nk = 5,10\ncandidates = 99\n"
      "[sweep]\nlambda_en = 0.01,0.1,1\nlambda_de = 0.01,0.1,1\nworkers = 3\n"
      "[export]\nout = results\nembeddings = true\n";
  const auto cfg = ExperimentConfig::parse(text);
  CHECK(cfg.split.target == Domain::B);
  CHECK(cfg.train.tau == 0.15);
  CHECK(cfg.train.ablation.no_pers);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(cfg.sweep_axes.at("lambda_de").size() == 3);
  const auto again = ExperimentConfig::parse(cfg.serialize());
  CHECK(again == cfg);
  CHECK(again.serialize() == cfg.serialize());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(ExperimentConfig::parse("[train]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[nowhere]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[train]\ndim = abc\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[train]\ndim = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[split]\ntarget_train = 0.9\n"), ConfigError);
}

TEST_CASE("flags override file values") {
  ExperimentConfig cfg;
  Overrides o;
  o.seed = 9;
  o.ablation = "gcn";
  o.out = "elsewhere";
  o.ks = std::vector<int>{3};
  const auto r = apply_overrides(cfg, o);
  CHECK(r.seeds == std::vector<std::uint64_t>{9});
  CHECK(r.train.ablation.gcn_only);
  CHECK(r.out == "elsewhere");
  CHECK(r.ks == std::vector<int>{3});
}

TEST_CASE("preprocess statistics and determinism") {
  const auto dir = scratch("pre");
  write(dir / "a.tsv",
        "user_id\titem_id\trating\ttimestamp\n"
        "u1\ti1\t5\t1\nu1\ti2\t4\t2\nu1\ti3\t3\t3\nu2\ti1\t5\t4\nu2\ti2\t2\t5\n"
        "u3\ti2\t1\t6\nu3\ti3\t5\t7\nu4\ti1\t3\t8\nu4\ti3\t3\t9\n");
  write(dir / "b.tsv", "u1\tj1\nu1\tj2\nu2\tj1\nu2\tj2\nu3\tj1\nu3\tj2\n");
  ExperimentConfig cfg;
  cfg.domain_a = dir / "a.tsv";
  cfg.domain_b = dir / "b.tsv";
  cfg.dataset_dir = dir / "ds";
  cfg.n_core = 2;
  std::ostringstream log;
  const auto ds = cmd_preprocess(cfg, log);
  // u4 has no B history and leaves; A keeps 7 of 9 cells, B all 6.
  CHECK(ds.n_users() == 3);
  const auto text = log.str();
  CHECK(text.find("A\t3\t3\t7\t0.222222") != std::string::npos);
  CHECK(text.find("B\t3\t2\t6\t0.000000") != std::string::npos);
  const auto first = slurp(dir / "ds" / "inter_A.tsv");
  cmd_preprocess(cfg, log);
  CHECK(slurp(dir / "ds" / "inter_A.tsv") == first);
  CHECK(slurp(dir / "ds" / "manifest.json").find(git_blob_sha1_file(dir / "a.tsv")) != std::string::npos);

  cfg.n_core = 40;
  CHECK_THROWS_AS(cmd_preprocess(cfg, log), ExhaustedDataset);
}

TEST_CASE("git blob hashes match git") {
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("train writes history, metrics, manifest and checkpoint") {
  const auto dir = scratch("train");
  auto cfg = synthetic_run(dir);
  std::ostringstream log;
  cmd_preprocess(cfg, log);
  cfg.seeds = {1, 2, 3, 4, 5};
  cfg.train.max_epochs = 1;
  cmd_train(cfg, log);
  const auto metrics = lines(slurp(cfg.out / "metrics.csv"));
  // 4 metrics x 2 cutoffs x 5 seeds per-seed rows, then the aggregate block.
  const auto marker = std::find(metrics.begin(), metrics.end(), "# aggregate");
  REQUIRE(marker != metrics.end());
  CHECK(marker - metrics.begin() - 1 == 40);
  CHECK(metrics.end() - marker - 2 == 8);
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto d = cfg.out / ("seed_" + std::to_string(s));
    CHECK(fs::exists(d / "model.ckpt"));
    CHECK(lines(slurp(d / "history.csv")).front() == "epoch,rec,en,de,item,reg,total,valid_metric");
  }
  const auto manifest = slurp(cfg.out / "manifest.json");
  CHECK(manifest.find(git_blob_sha1_file(cfg.dataset_dir / "inter_A.tsv")) != std::string::npos);
  CHECK(manifest.find("\"seeds\"") != std::string::npos);

  // Re-evaluating the checkpoints reproduces the metrics file.
  const auto before = slurp(cfg.out / "metrics.csv");
  cmd_evaluate(cfg, log);
  CHECK(slurp(cfg.out / "metrics.csv") == before);
}

TEST_CASE("gcn_only history has only rec and reg columns set") {
  const auto dir = scratch("gcn");
  auto cfg = synthetic_run(dir);
  std::ostringstream log;
  cmd_preprocess(cfg, log);
  cfg.train.ablation.gcn_only = true;
  cmd_train(cfg, log);
  const auto rows = lines(slurp(cfg.out / "seed_1" / "history.csv"));
  for (std::size_t k = 1; k < rows.size(); ++k) {
    std::vector<double> v;
    std::stringstream ss(rows[k]);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    CHECK(v[1] > 0.0);
    CHECK(v[2] == 0.0);
    CHECK(v[3] == 0.0);
    CHECK(v[4] == 0.0);
    CHECK(v[5] > 0.0);
  }
  CHECK_FALSE(fs::exists(cfg.out / "attention.csv"));
}

TEST_CASE("sweeps cover the grid deterministically and a 1x1 sweep equals train") {
  const auto dir = scratch("sweep");
  auto cfg = synthetic_run(dir);
  std::ostringstream log;
  cmd_preprocess(cfg, log);
  cfg.sweep_axes = {{"lambda_en", {0.01, 0.1, 1.0}}, {"lambda_de", {0.01, 0.1, 1.0}}};
  cfg.workers = 3;
  cfg.train.max_epochs = 1;
  const auto grid = cmd_sweep(cfg, log);
  CHECK(grid.cells.size() == 9);
  const auto first = slurp(cfg.out / "sweep.csv");
  CHECK(lines(slurp(cfg.out / "heatmap.csv")).size() == 4);
  cfg.workers = 1;
  cmd_sweep(cfg, log);
  CHECK(slurp(cfg.out / "sweep.csv") == first);

  cfg.sweep_axes = {{"tau", {0.2}}};
  const auto single = cmd_sweep(cfg, log);
  const auto trained = cmd_train(cfg, log);
  CHECK(single.cells.size() == 1);
  CHECK(single.cells[0].valid == trained.best_valid[0]);
  CHECK(single.cells[0].test ==
        trained.metrics.at(Domain::A).per_seed[0].at({Metric::Recall, cfg.train.monitor_k}));

  cfg.sweep_axes = {{"tau", {0.12}}};
  CHECK_THROWS_AS(cmd_sweep(cfg, log), ConfigError);
  cfg.sweep_axes = {{"dim", {8}}};
  CHECK_THROWS_AS(cmd_sweep(cfg, log), ConfigError);
}

TEST_CASE("attention shares form a percentage simplex") {
  const auto ds = oracle::toy_dataset(10, 12, 3);
  const auto graphs = build_graphs(ds);
  TrainConfig t;
  t.dim = 4;
  t.layers = 1;
  DgcdrModel model(ds.n_users(), {ds.n_items(Domain::A), ds.n_items(Domain::B)}, t, 1);
  const auto share = attention_distribution(model, graphs, Domain::A);
  CHECK(std::abs(share.shared_pct + share.specific_pct - 100.0) < 1e-6);
  for (Domain d : kDomains) {
    model.shared_gate(d).output_weight().value.setZero();
    model.specific_gate(d).output_weight().value.setZero();
  }
  const auto even = attention_distribution(model, graphs, Domain::B);
  CHECK(even.shared_pct == doctest::Approx(50.0));
  CHECK(even.specific_pct == doctest::Approx(50.0));
}

TEST_CASE("embedding export shapes and round trip") {
  const auto dir = scratch("emb");
  const auto ds = oracle::toy_dataset(10, 12, 3);
  const auto graphs = build_graphs(ds);
  TrainConfig t;
  t.dim = 4;
  t.layers = 1;
  const DgcdrModel model(ds.n_users(), {ds.n_items(Domain::A), ds.n_items(Domain::B)}, t, 1);
  const auto files = export_embeddings(model, graphs, ds, dir);
  CHECK(files.size() == 8);
  for (const auto& f : files) {
    const auto m = read_matrix_f32(f);
    CHECK(m.rows() == 10);
    CHECK(m.cols() == 8);
  }
  const auto fused = model.user_features(graphs, Domain::A).fused;
  const auto back = read_matrix_f32(dir / "fused_A.f32");
  CHECK((back - fused.cast<float>().cast<double>()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(lines(slurp(dir / "users.tsv")).size() == 11);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  auto cfg = synthetic_run(dir);
  write(dir / "ok.ini", cfg.serialize());
  CHECK(run({"preprocess", "--config", (dir / "ok.ini").string()}) == 0);
  CHECK(run({"train", "--config", (dir / "ok.ini").string(), "--seed", "3", "--k", "5"}) == 0);
  CHECK(lines(slurp(cfg.out / "metrics.csv")).size() == 1 + 4 + 2 + 4);
  CHECK(run({"export", "--config", (dir / "ok.ini").string(), "--seed", "3"}) == 0);
  CHECK(fs::exists(cfg.out / "seed_3" / "embeddings" / "c_B.f32"));

  CHECK(run({}) == 1);
  CHECK(run({"train"}) == 1);
  CHECK(run({"train", "--config", (dir / "absent.ini").string()}) == 1);
  CHECK(run({"train", "--config", (dir / "ok.ini").string(), "--ablation", "bogus"}) == 1);

  auto missing = cfg;
  missing.dataset_dir = dir / "nowhere";
  write(dir / "missing.ini", missing.serialize());
  std::string err;
  CHECK(run({"train", "--config", (dir / "missing.ini").string()}, &err) == 2);
  CHECK(err.find("nowhere") != std::string::npos);

  auto big = cfg;
  big.n_core = 500;
  big.dataset_dir = dir / "big";
  write(dir / "big.ini", big.serialize());
  CHECK(run({"preprocess", "--config", (dir / "big.ini").string()}) == 2);

  auto wild = cfg;
  wild.train.lr = 1e12;
  wild.train.max_epochs = 30;
  write(dir / "wild.ini", wild.serialize());
  CHECK(run({"train", "--config", (dir / "wild.ini").string()}) == 3);
}
