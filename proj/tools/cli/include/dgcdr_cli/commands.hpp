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

// The five experiment commands and the argv entry point.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dgcdr/corpus.hpp"
#include "dgcdr/eval.hpp"
#include "dgcdr_cli/config.hpp"

namespace dgcdr::cli {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ablation;
  std::optional<std::filesystem::path> out;
  std::optional<std::vector<int>> ks;
};

ExperimentConfig apply_overrides(ExperimentConfig cfg, const Overrides& o);

// Table-style statistics block: users, items, interactions, sparsity.
std::string format_stats(const ProcessedDataset& ds);

ProcessedDataset cmd_preprocess(const ExperimentConfig& cfg, std::ostream& log);

struct TrainOutput {
  std::map<Domain, MetricsReport> metrics;
  std::vector<double> best_valid;  // one per seed
};

// Trains one model per seed; writes config.ini, per-seed history and
// checkpoint, metrics.csv, exports and manifest.json under cfg.out.
TrainOutput cmd_train(const ExperimentConfig& cfg, std::ostream& log);

// Reloads per-seed checkpoints from cfg.out and rewrites metrics.csv.
std::map<Domain, MetricsReport> cmd_evaluate(const ExperimentConfig& cfg, std::ostream& log);

struct SweepCell {
  std::vector<double> values;  // one per axis, in axis order
  double valid = 0.0;          // mean best validation metric over seeds
  double test = 0.0;           // mean test Recall@monitor_k on the target domain
};

struct SweepResult {
  std::vector<std::string> axes;
  std::vector<SweepCell> cells;  // cartesian product, last axis fastest
};

// Axis values must lie on the standard tuning grids.
SweepResult cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);

void cmd_export(const ExperimentConfig& cfg, std::ostream& log);

// Parses argv and dispatches. Returns the process exit code: 0 success,
// 1 usage or config error, 2 data error, 3 divergence.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dgcdr::cli
