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

// Experiment configuration: a sectioned key/value file mapped onto the
// corpus, split, training, evaluation, sweep and export settings.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dgcdr/corpus.hpp"
#include "dgcdr/model.hpp"

namespace dgcdr::cli {

struct ExperimentConfig {
  // [data]
  std::filesystem::path domain_a;
  std::filesystem::path domain_b;
  std::filesystem::path dataset_dir = "dataset";
  unsigned n_core = 5;
  // [split]
  SplitSpec split;
  // [train]
  TrainConfig train;
  std::vector<std::uint64_t> seeds{2025};
  // [eval]
  std::vector<int> ks{10, 20};
  int candidates = 0;  // 0 = full ranking
  // [sweep] axis name -> values; names are [train] keys
  std::map<std::string, std::vector<double>> sweep_axes;
  int workers = 1;
  // [export]
  std::filesystem::path out = "runs";
  bool export_attention = true;
  bool export_embeddings = false;

  // Throws ConfigError on bad values or unknown keys.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
  std::string serialize() const;
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

// Writes `value` into the [train] field named `key`.
void set_train_field(TrainConfig& cfg, const std::string& key, double value);
double get_train_field(const TrainConfig& cfg, const std::string& key);

std::vector<int> parse_int_list(const std::string& text);

}  // namespace dgcdr::cli
