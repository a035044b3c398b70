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

// Dual-domain interaction ingestion, iterative N-core/overlap sampling and
// train/valid/test splitting.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dgcdr {

enum class Domain : std::uint8_t { A = 0, B = 1 };

inline constexpr std::array<Domain, 2> kDomains{Domain::A, Domain::B};

inline constexpr std::size_t index(Domain d) { return static_cast<std::size_t>(d); }
inline constexpr Domain other(Domain d) { return d == Domain::A ? Domain::B : Domain::A; }
char domain_letter(Domain d);
Domain parse_domain(const std::string& text);

struct RawInteraction {
  std::string user_key;
  std::string item_key;
  Domain domain = Domain::A;
  std::optional<std::int64_t> timestamp;
};

enum class Split : std::uint8_t { Train = 0, Valid = 1, Test = 2 };

const char* split_name(Split s);
Split parse_split(const std::string& text);

struct SplitSpec {
  Domain target = Domain::A;
  double target_train = 0.60;
  double target_valid = 0.20;
  double target_test = 0.20;
  double source_train = 0.80;
  double source_valid = 0.20;
  std::uint64_t seed = 0;

  // Throws ConfigError unless each domain's fractions lie in (0,1) and sum to 1.
  void validate() const;
};

struct UserItem {
  int user = 0;
  int item = 0;
  friend bool operator==(const UserItem&, const UserItem&) = default;
};

struct DomainData {
  std::vector<std::string> item_keys;  // dense id -> key
  std::vector<UserItem> interactions;
  std::vector<Split> splits;  // parallel to interactions; empty before splitting
};

struct ProcessedDataset {
  std::vector<std::string> user_keys;  // overlap users, shared by both domains
  std::array<DomainData, 2> domains;
  unsigned n_core = 0;
  Domain target = Domain::A;

  int n_users() const { return static_cast<int>(user_keys.size()); }
  int n_items(Domain d) const { return static_cast<int>(domains[index(d)].item_keys.size()); }
  const DomainData& domain(Domain d) const { return domains[index(d)]; }
  DomainData& domain(Domain d) { return domains[index(d)]; }
  bool has_splits() const;

  // Interactions of one split, in stored order.
  std::vector<UserItem> pairs(Domain d, Split s) const;
  // Per-user sorted item lists for the given splits.
  std::vector<std::vector<int>> user_items(Domain d, std::initializer_list<Split> splits) const;
  std::vector<std::vector<int>> user_items(Domain d) const;  // all splits
};

// Parses the tab-separated interaction format from a stream. `source` names
// the stream in error messages.
std::vector<RawInteraction> parse_interactions(std::istream& in, Domain domain,
                                               const std::string& source);
std::vector<RawInteraction> load_interactions(const std::filesystem::path& path,
                                              Domain domain);
void write_interactions(const std::filesystem::path& path,
                        std::span<const RawInteraction> interactions);

struct NcoreResult {
  std::vector<RawInteraction> a;
  std::vector<RawInteraction> b;
  std::vector<std::string> overlap_users;  // first-appearance order over a then b
};

// Overlap extraction plus per-domain iterative user/item pruning, repeated
// until the whole procedure is a fixed point. Input order is preserved.
NcoreResult iterative_ncore_filter(std::span<const RawInteraction> inter_a,
                                   std::span<const RawInteraction> inter_b, unsigned n);

// Assigns dense ids in first-appearance order.
ProcessedDataset build_dataset(const NcoreResult& filtered, unsigned n_core);

// Seeded interaction-level split; the target domain gets train/valid/test and
// the source domain train/valid. Every user and item keeps at least one train
// interaction in each domain.
ProcessedDataset split_dataset(ProcessedDataset ds, const SplitSpec& spec);

struct DomainStats {
  int users = 0;
  int items = 0;
  std::size_t interactions = 0;
  double sparsity = 0.0;  // 1 - inter / (users * items)
};

DomainStats domain_stats(const ProcessedDataset& ds, Domain d);

void save_dataset(const ProcessedDataset& ds, const std::filesystem::path& dir);
ProcessedDataset load_dataset(const std::filesystem::path& dir);

}  // namespace dgcdr
