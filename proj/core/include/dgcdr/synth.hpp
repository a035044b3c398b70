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

// Synthetic dual-domain interaction generator with planted shared and
// domain-specific user preferences.

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "dgcdr/corpus.hpp"
#include "dgcdr/diff.hpp"

namespace dgcdr {

struct SynthSpec {
  int n_users = 200;
  std::array<int, 2> n_items{300, 300};
  int shared_dim = 8;
  int specific_dim = 8;
  double shared_weight = 1.0;
  double specific_weight = 0.5;
  double signal = 3.0;     // logit scale
  double density = 0.05;   // target fraction of observed user-item pairs
  unsigned n_core = 5;
  std::uint64_t seed = 1;

  // Throws ConfigError on non-positive sizes or weights out of range.
  void validate() const;
};

struct SynthData {
  std::array<std::vector<RawInteraction>, 2> interactions;
  diff::Matrix user_shared;                     // n_users x shared_dim
  std::array<diff::Matrix, 2> user_specific;    // n_users x specific_dim
  std::array<diff::Matrix, 2> logits;           // n_users x n_items, bias excluded
  std::array<double, 2> bias{};
};

// Items with the same index in both domains share their shared-block
// latents, so a zero specific weight yields identical logit matrices on the
// common index range. Every user ends with at least n_core interactions per
// domain and every item with at least n_core users. Throws
// DensityUnreachable when the target density cannot hold the n-core floor.
SynthData generate(const SynthSpec& spec);

// generate -> n-core filter -> dense ids -> split.
ProcessedDataset synth_dataset(const SynthSpec& spec, const SplitSpec& split);

void write_synth(const SynthData& data, const std::filesystem::path& path_a,
                 const std::filesystem::path& path_b);

}  // namespace dgcdr
