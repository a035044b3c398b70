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

// Output writers: loss history, metrics, attention distribution, embedding
// matrices and the run manifest.

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dgcdr/corpus.hpp"
#include "dgcdr/eval.hpp"
#include "dgcdr/model.hpp"
#include "dgcdr/train.hpp"
#include "dgcdr_cli/config.hpp"

namespace dgcdr::cli {

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history);

// Per-seed rows, then a "# aggregate" block with mean and sample std.
void write_metrics_csv(const std::filesystem::path& path,
                       const std::map<Domain, MetricsReport>& reports);

struct AttentionShare {
  double shared_pct = 0.0;
  double specific_pct = 0.0;
};

// Mean attention weights over users, in percent. Requires the attention
// branch (not available under gcn_only).
AttentionShare attention_distribution(const DgcdrModel& model, const DomainGraphs& graphs,
                                      Domain d);
void write_attention_csv(const std::filesystem::path& path,
                         const std::vector<std::pair<std::uint64_t, std::array<AttentionShare, 2>>>& rows);

// "rows cols\n" then row-major float32 little-endian values.
void write_matrix_f32(const std::filesystem::path& path, const diff::Matrix& m);
diff::Matrix read_matrix_f32(const std::filesystem::path& path);

// User feature matrices g, c, s, fused per domain plus users.tsv; returns the
// matrix files written.
std::vector<std::filesystem::path> export_embeddings(const DgcdrModel& model,
                                                     const DomainGraphs& graphs,
                                                     const ProcessedDataset& ds,
                                                     const std::filesystem::path& dir);

// Git blob object id: sha1("blob <size>\0" + content), lowercase hex.
std::string git_blob_sha1(const std::string& content);
std::string git_blob_sha1_file(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const ExperimentConfig& cfg, const std::vector<std::filesystem::path>& inputs);

}  // namespace dgcdr::cli
