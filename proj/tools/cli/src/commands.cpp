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

#include "dgcdr_cli/commands.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <thread>

#include "dgcdr/errors.hpp"
#include "dgcdr/train.hpp"
#include "dgcdr_cli/exporters.hpp"

namespace dgcdr::cli {
namespace {

namespace fs = std::filesystem;

fs::path seed_dir(const ExperimentConfig& cfg, std::uint64_t seed) {
  return cfg.out / ("seed_" + std::to_string(seed));
}

TrainConfig seeded(const ExperimentConfig& cfg, std::uint64_t seed) {
  TrainConfig t = cfg.train;
  t.seed = seed;
  return t;
}

std::vector<Domain> evaluated_domains(const ProcessedDataset& ds) {
  std::vector<Domain> out;
  for (Domain d : kDomains) {
    const auto& splits = ds.domain(d).splits;
    if (std::find(splits.begin(), splits.end(), Split::Test) != splits.end()) out.push_back(d);
  }
  return out;
}

std::vector<fs::path> dataset_inputs(const ExperimentConfig& cfg) {
  std::vector<fs::path> inputs;
  for (const char* name : {"users.tsv", "items_A.tsv", "items_B.tsv", "inter_A.tsv",
                           "inter_B.tsv", "dataset.meta"}) {
    inputs.push_back(cfg.dataset_dir / name);
  }
  return inputs;
}

DgcdrModel load_model(const ExperimentConfig& cfg, const ProcessedDataset& ds, std::uint64_t seed) {
  DgcdrModel model(ds.n_users(), {ds.n_items(Domain::A), ds.n_items(Domain::B)},
                   seeded(cfg, seed), seed);
  diff::load_checkpoint(model.store(), seed_dir(cfg, seed) / "model.ckpt");
  return model;
}

std::map<Domain, MetricsReport> evaluate_models(const ExperimentConfig& cfg,
                                                const ProcessedDataset& ds,
                                                const DomainGraphs& graphs,
                                                const std::vector<DgcdrModel>& models) {
  const CandidateOptions opts{cfg.candidates, cfg.split.seed};
  std::map<Domain, MetricsReport> reports;
  for (Domain d : evaluated_domains(ds)) {
    std::vector<diff::Matrix> scores;
    scores.reserve(models.size());
    for (const auto& m : models) scores.push_back(m.score_matrix(graphs, d));
    reports[d] = evaluate_model(scores, ds, d, cfg.ks, cfg.seeds, opts);
  }
  return reports;
}

void write_exports(const ExperimentConfig& cfg, const ProcessedDataset& ds,
                   const DomainGraphs& graphs, const std::vector<DgcdrModel>& models,
                   bool attention, bool embeddings) {
  if (attention && !cfg.train.ablation.gcn_only) {
    std::vector<std::pair<std::uint64_t, std::array<AttentionShare, 2>>> rows;
    for (std::size_t s = 0; s < models.size(); ++s) {
      rows.push_back({cfg.seeds[s],
                      {attention_distribution(models[s], graphs, Domain::A),
                       attention_distribution(models[s], graphs, Domain::B)}});
    }
    write_attention_csv(cfg.out / "attention.csv", rows);
  }
  if (embeddings) {
    for (std::size_t s = 0; s < models.size(); ++s) {
      export_embeddings(models[s], graphs, ds, seed_dir(cfg, cfg.seeds[s]) / "embeddings");
    }
  }
}

void print_metrics(std::ostream& log, const std::map<Domain, MetricsReport>& reports) {
  for (const auto& [d, report] : reports) {
    for (const auto& [key, mean] : report.mean) {
      char line[160];
      std::snprintf(line, sizeof line, "%c %s@%d = %.4f +- %.4f\n", domain_letter(d),
                    metric_name(key.first), key.second, mean, report.stddev.at(key));
      log << line;
    }
  }
}

const std::map<std::string, const std::vector<double>*>& sweep_grids() {
  static const std::map<std::string, const std::vector<double>*> grids{
      {"lambda_en", &grids::kLambda}, {"lambda_de", &grids::kLambda},
      {"lambda_item", &grids::kLambda}, {"l2", &grids::kL2},
      {"dropout", &grids::kDropout},  {"tau", &grids::kTau},
      {"lr", &grids::kLearningRate}};
  return grids;
}

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig cfg, const Overrides& o) {
  if (o.seed) cfg.seeds = {*o.seed};
  if (o.ablation) cfg.train.ablation = AblationFlags::parse(*o.ablation);
  if (o.out) cfg.out = *o.out;
  if (o.ks) cfg.ks = *o.ks;
  cfg.validate();
  return cfg;
}

std::string format_stats(const ProcessedDataset& ds) {
  std::string out = "domain\tusers\titems\tinteractions\tsparsity\n";
  for (Domain d : kDomains) {
    const auto s = domain_stats(ds, d);
    char line[160];
    std::snprintf(line, sizeof line, "%c\t%d\t%d\t%zu\t%.6f\n", domain_letter(d), s.users, s.items,
                  s.interactions, s.sparsity);
    out += line;
  }
  return out;
}

ProcessedDataset cmd_preprocess(const ExperimentConfig& cfg, std::ostream& log) {
  const auto a = load_interactions(cfg.domain_a, Domain::A);
  const auto b = load_interactions(cfg.domain_b, Domain::B);
  const auto filtered = iterative_ncore_filter(a, b, cfg.n_core);
  ProcessedDataset ds = split_dataset(build_dataset(filtered, cfg.n_core), cfg.split);
  save_dataset(ds, cfg.dataset_dir);
  write_manifest(cfg.dataset_dir / "manifest.json", "preprocess", cfg, {cfg.domain_a, cfg.domain_b});
  log << format_stats(ds);
  return ds;
}

TrainOutput cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  for (const auto& field : cfg.train.off_grid_fields()) {
    log << "warning: train." << field << " lies outside the standard tuning grid\n";
  }
  const ProcessedDataset ds = load_dataset(cfg.dataset_dir);
  const DomainGraphs graphs = build_graphs(ds);
  fs::create_directories(cfg.out);
  {
    std::ofstream conf(cfg.out / "config.ini");
    conf << cfg.serialize();
  }

  TrainOutput output;
  std::vector<DgcdrModel> models;
  for (std::uint64_t seed : cfg.seeds) {
    TrainResult r = train(ds, seeded(cfg, seed));
    const auto dir = seed_dir(cfg, seed);
    write_history_csv(dir / "history.csv", r.history);
    diff::save_checkpoint(r.model.store(), dir / "model.ckpt");
    log << "seed " << seed << ": best epoch " << r.best_epoch << " of " << r.stopped_epoch
        << ", valid " << r.best_valid << '\n';
    output.best_valid.push_back(r.best_valid);
    models.push_back(std::move(r.model));
  }
  output.metrics = evaluate_models(cfg, ds, graphs, models);
  write_metrics_csv(cfg.out / "metrics.csv", output.metrics);
  write_exports(cfg, ds, graphs, models, cfg.export_attention, cfg.export_embeddings);
  write_manifest(cfg.out / "manifest.json", "train", cfg, dataset_inputs(cfg));
  print_metrics(log, output.metrics);
  return output;
}

std::map<Domain, MetricsReport> cmd_evaluate(const ExperimentConfig& cfg, std::ostream& log) {
  const ProcessedDataset ds = load_dataset(cfg.dataset_dir);
  const DomainGraphs graphs = build_graphs(ds);
  std::vector<DgcdrModel> models;
  for (std::uint64_t seed : cfg.seeds) models.push_back(load_model(cfg, ds, seed));
  auto reports = evaluate_models(cfg, ds, graphs, models);
  write_metrics_csv(cfg.out / "metrics.csv", reports);
  print_metrics(log, reports);
  return reports;
}

SweepResult cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.sweep_axes.empty()) throw ConfigError("sweep needs at least one axis in [sweep]");
  SweepResult result;
  std::vector<std::vector<double>> axis_values;
  for (const auto& [axis, values] : cfg.sweep_axes) {
    const auto grid = sweep_grids().find(axis);
    if (grid == sweep_grids().end()) throw ConfigError("'" + axis + "' is not a tunable grid axis");
    for (double v : values) {
      if (!grids::contains(*grid->second, v)) {
        throw ConfigError("sweep value " + std::to_string(v) + " for '" + axis +
                          "' is not on its grid");
      }
    }
    result.axes.push_back(axis);
    axis_values.push_back(values);
  }

  std::size_t n_cells = 1;
  for (const auto& v : axis_values) n_cells *= v.size();
  result.cells.resize(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    std::size_t rest = c;
    result.cells[c].values.resize(axis_values.size());
    for (std::size_t a = axis_values.size(); a-- > 0;) {
      result.cells[c].values[a] = axis_values[a][rest % axis_values[a].size()];
      rest /= axis_values[a].size();
    }
  }

  const ProcessedDataset ds = load_dataset(cfg.dataset_dir);
  const DomainGraphs graphs = build_graphs(ds);
  const int ks[] = {cfg.train.monitor_k};
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(n_cells);
  auto worker = [&]() {
    for (std::size_t c = next++; c < n_cells; c = next++) {
      try {
        auto& cell = result.cells[c];
        TrainConfig base = cfg.train;
        for (std::size_t a = 0; a < result.axes.size(); ++a) {
          set_train_field(base, result.axes[a], cell.values[a]);
        }
        double valid = 0.0, test = 0.0;
        for (std::uint64_t seed : cfg.seeds) {
          TrainConfig t = base;
          t.seed = seed;
          const TrainResult r = train(ds, t);
          valid += r.best_valid;
          const auto table =
              evaluate_split(r.model.score_matrix(graphs, ds.target), ds, ds.target, Split::Test, ks,
                             {cfg.candidates, cfg.split.seed});
          test += table.at({Metric::Recall, cfg.train.monitor_k});
        }
        cell.valid = valid / static_cast<double>(cfg.seeds.size());
        cell.test = test / static_cast<double>(cfg.seeds.size());
      } catch (...) {
        failures[c] = std::current_exception();
      }
    }
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), n_cells);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  fs::create_directories(cfg.out);
  {
    std::ofstream out(cfg.out / "sweep.csv");
    for (const auto& axis : result.axes) out << axis << ',';
    out << "valid,test_recall\n";
    for (const auto& cell : result.cells) {
      char buf[64];
      for (double v : cell.values) {
        std::snprintf(buf, sizeof buf, "%.17g,", v);
        out << buf;
      }
      std::snprintf(buf, sizeof buf, "%.17g,", cell.valid);
      out << buf;
      std::snprintf(buf, sizeof buf, "%.17g\n", cell.test);
      out << buf;
    }
  }
  if (result.axes.size() == 2) {
    // Heat-map matrix: rows follow the first axis, columns the second.
    std::ofstream out(cfg.out / "heatmap.csv");
    const auto& rows = axis_values[0];
    const auto& cols = axis_values[1];
    out << result.axes[0] << '\\' << result.axes[1];
    for (double c : cols) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out << rows[r];
      for (std::size_t c = 0; c < cols.size(); ++c) {
        char buf[64];
        std::snprintf(buf, sizeof buf, ",%.17g", result.cells[r * cols.size() + c].test);
        out << buf;
      }
      out << '\n';
    }
  }
  write_manifest(cfg.out / "manifest.json", "sweep", cfg, dataset_inputs(cfg));
  log << "sweep: " << n_cells << " cells written to " << (cfg.out / "sweep.csv").string() << '\n';
  return result;
}

void cmd_export(const ExperimentConfig& cfg, std::ostream& log) {
  const ProcessedDataset ds = load_dataset(cfg.dataset_dir);
  const DomainGraphs graphs = build_graphs(ds);
  std::vector<DgcdrModel> models;
  for (std::uint64_t seed : cfg.seeds) models.push_back(load_model(cfg, ds, seed));
  write_exports(cfg, ds, graphs, models, true, true);
  log << "exports written under " << cfg.out.string() << '\n';
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Disentangled graph cross-domain recommendation toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ablation;
  std::optional<std::string> out_dir;
  std::optional<std::string> ks;

  const std::pair<const char*, const char*> commands[] = {
      {"preprocess", "filter, split and save the dual-domain dataset"},
      {"train", "train one model per seed and write metrics"},
      {"evaluate", "re-evaluate saved checkpoints"},
      {"sweep", "grid search over [sweep] axes"},
      {"export", "write attention shares and embedding matrices"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--seed", seed, "run a single seed");
    sub->add_option("--ablation", ablation, "none or a list of gcn,-dec,-enc,-itdis,-pers");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--k", ks, "comma-separated cutoffs");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    Overrides o;
    o.seed = seed;
    o.ablation = ablation;
    if (out_dir) o.out = *out_dir;
    if (ks) o.ks = parse_int_list(*ks);
    const ExperimentConfig cfg = apply_overrides(ExperimentConfig::load(config_path), o);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "preprocess") cmd_preprocess(cfg, out);
    else if (cmd == "train") cmd_train(cfg, out);
    else if (cmd == "evaluate") cmd_evaluate(cfg, out);
    else if (cmd == "sweep") cmd_sweep(cfg, out);
    else cmd_export(cfg, out);
    return 0;
  } catch (const Diverged& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dgcdr::cli
