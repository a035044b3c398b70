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

#include "dgcdr/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "dgcdr/errors.hpp"

namespace dgcdr {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::optional<std::int64_t> parse_timestamp(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec == std::errc() && ptr == end) return value;
  // Some dumps store fractional epoch seconds.
  double real = 0.0;
  auto [rptr, rec] = std::from_chars(text.data(), end, real);
  if (rec == std::errc() && rptr == end && std::isfinite(real)) {
    return static_cast<std::int64_t>(std::floor(real));
  }
  throw std::invalid_argument(text);
}

using DegreeMap = std::unordered_map<std::string, std::size_t>;

std::unordered_set<std::string> user_set(const std::vector<RawInteraction>& rows) {
  std::unordered_set<std::string> users;
  for (const auto& r : rows) users.insert(r.user_key);
  return users;
}

// Keeps only rows whose user appears in `keep`. Returns true when rows were removed.
bool restrict_users(std::vector<RawInteraction>& rows,
                    const std::unordered_set<std::string>& keep) {
  const auto before = rows.size();
  std::erase_if(rows, [&](const RawInteraction& r) { return !keep.contains(r.user_key); });
  return rows.size() != before;
}

bool restrict_to_overlap(std::vector<RawInteraction>& a, std::vector<RawInteraction>& b) {
  const auto users_a = user_set(a);
  const auto users_b = user_set(b);
  std::unordered_set<std::string> both;
  for (const auto& u : users_a) {
    if (users_b.contains(u)) both.insert(u);
  }
  const bool changed_a = restrict_users(a, both);
  const bool changed_b = restrict_users(b, both);
  return changed_a || changed_b;
}

// Steps 2-4: alternate user and item pruning inside one domain until stable.
bool prune_domain(std::vector<RawInteraction>& rows, unsigned n) {
  bool changed_any = false;
  while (true) {
    bool changed = false;
    DegreeMap user_deg;
    for (const auto& r : rows) ++user_deg[r.user_key];
    auto before = rows.size();
    std::erase_if(rows, [&](const RawInteraction& r) { return user_deg[r.user_key] < n; });
    changed |= rows.size() != before;

    DegreeMap item_deg;
    for (const auto& r : rows) ++item_deg[r.item_key];
    before = rows.size();
    std::erase_if(rows, [&](const RawInteraction& r) { return item_deg[r.item_key] < n; });
    changed |= rows.size() != before;

    if (!changed) break;
    changed_any = true;
  }
  return changed_any;
}

template <class Key>
int intern(std::unordered_map<Key, int>& ids, std::vector<Key>& keys, const Key& key) {
  auto [it, inserted] = ids.try_emplace(key, static_cast<int>(keys.size()));
  if (inserted) keys.push_back(key);
  return it->second;
}

struct Fractions {
  double train, valid, test;
};

void split_domain(DomainData& dd, int n_users, Fractions f, std::uint64_t seed) {
  const std::size_t n = dd.interactions.size();
  const auto n_valid = static_cast<std::size_t>(std::llround(static_cast<double>(n) * f.valid));
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * f.test));
  if (n_valid == 0 || (f.test > 0.0 && n_test == 0) || n_valid + n_test >= n) {
    throw TooFewInteractions("cannot split " + std::to_string(n) +
                             " interactions into non-empty buckets");
  }
  const std::size_t n_train = n - n_valid - n_test;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  dd.splits.assign(n, Split::Train);
  for (std::size_t k = n_train; k < n_train + n_valid; ++k) dd.splits[order[k]] = Split::Valid;
  for (std::size_t k = n_train + n_valid; k < n; ++k) dd.splits[order[k]] = Split::Test;

  const int n_items = static_cast<int>(dd.item_keys.size());
  std::vector<int> user_train(n_users, 0);
  std::vector<int> item_train(n_items, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (dd.splits[i] == Split::Train) {
      ++user_train[dd.interactions[i].user];
      ++item_train[dd.interactions[i].item];
    }
  }

  // Donor cursor walks the shuffled order from the back; a donor is a train
  // interaction whose user and item both keep another train interaction.
  std::size_t cursor = n;
  auto give_back = [&](Split label, std::size_t taken) {
    while (cursor > 0) {
      const std::size_t idx = order[--cursor];
      if (idx == taken || dd.splits[idx] != Split::Train) continue;
      const auto& p = dd.interactions[idx];
      if (user_train[p.user] < 2 || item_train[p.item] < 2) continue;
      dd.splits[idx] = label;
      --user_train[p.user];
      --item_train[p.item];
      return;
    }
  };

  auto repair = [&](bool by_user) {
    const int count = by_user ? n_users : n_items;
    std::vector<std::vector<std::size_t>> positions(count);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& p = dd.interactions[order[k]];
      positions[by_user ? p.user : p.item].push_back(order[k]);
    }
    auto& train_count = by_user ? user_train : item_train;
    for (int e = 0; e < count; ++e) {
      if (train_count[e] > 0 || positions[e].empty()) continue;
      const std::size_t idx = positions[e].front();
      const Split old = dd.splits[idx];
      dd.splits[idx] = Split::Train;
      ++user_train[dd.interactions[idx].user];
      ++item_train[dd.interactions[idx].item];
      give_back(old, idx);
    }
  };
  repair(true);
  repair(false);
}

}  // namespace

char domain_letter(Domain d) { return d == Domain::A ? 'A' : 'B'; }

Domain parse_domain(const std::string& text) {
  if (text == "A" || text == "a") return Domain::A;
  if (text == "B" || text == "b") return Domain::B;
  throw ConfigError("unknown domain '" + text + "' (expected A or B)");
}

const char* split_name(Split s) {
  switch (s) {
    case Split::Train:
      return "train";
    case Split::Valid:
      return "valid";
    case Split::Test:
      return "test";
  }
  return "?";
}

Split parse_split(const std::string& text) {
  if (text == "train") return Split::Train;
  if (text == "valid") return Split::Valid;
  if (text == "test") return Split::Test;
  throw DataError("unknown split label '" + text + "'");
}

void SplitSpec::validate() const {
  auto check = [](double f, const char* name) {
    if (!(f > 0.0 && f < 1.0)) {
      throw ConfigError(std::string("split fraction ") + name + " must lie in (0,1)");
    }
  };
  check(target_train, "target_train");
  check(target_valid, "target_valid");
  check(target_test, "target_test");
  check(source_train, "source_train");
  check(source_valid, "source_valid");
  if (std::abs(target_train + target_valid + target_test - 1.0) > 1e-9) {
    throw ConfigError("target split fractions must sum to 1");
  }
  if (std::abs(source_train + source_valid - 1.0) > 1e-9) {
    throw ConfigError("source split fractions must sum to 1");
  }
}

bool ProcessedDataset::has_splits() const {
  for (const auto& dd : domains) {
    if (dd.splits.size() != dd.interactions.size() || dd.interactions.empty()) return false;
  }
  return true;
}

std::vector<UserItem> ProcessedDataset::pairs(Domain d, Split s) const {
  const auto& dd = domain(d);
  std::vector<UserItem> out;
  for (std::size_t i = 0; i < dd.interactions.size(); ++i) {
    if (dd.splits[i] == s) out.push_back(dd.interactions[i]);
  }
  return out;
}

std::vector<std::vector<int>> ProcessedDataset::user_items(
    Domain d, std::initializer_list<Split> splits) const {
  const auto& dd = domain(d);
  std::vector<std::vector<int>> out(n_users());
  for (std::size_t i = 0; i < dd.interactions.size(); ++i) {
    const Split s = dd.splits.empty() ? Split::Train : dd.splits[i];
    if (std::find(splits.begin(), splits.end(), s) == splits.end()) continue;
    out[dd.interactions[i].user].push_back(dd.interactions[i].item);
  }
  for (auto& items : out) std::sort(items.begin(), items.end());
  return out;
}

std::vector<std::vector<int>> ProcessedDataset::user_items(Domain d) const {
  return user_items(d, {Split::Train, Split::Valid, Split::Test});
}

std::vector<RawInteraction> parse_interactions(std::istream& in, Domain domain,
                                               const std::string& source) {
  std::vector<RawInteraction> rows;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t expected_fields = 0;
  std::size_t line_no = 0;
  bool first_content = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first_content) {
      first_content = false;
      if (line.rfind("user", 0) == 0) continue;
    }
    auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 4) {
      throw MalformedLine(line_no, "expected 2 to 4 tab-separated fields, got " +
                                       std::to_string(fields.size()));
    }
    if (expected_fields == 0) expected_fields = fields.size();
    if (fields.size() != expected_fields) {
      throw MalformedLine(line_no, "expected " + std::to_string(expected_fields) +
                                       " fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw MalformedLine(line_no, "empty user or item key");
    }
    RawInteraction row{fields[0], fields[1], domain, std::nullopt};
    if (fields.size() == 4) {
      try {
        row.timestamp = parse_timestamp(fields[3]);
      } catch (const std::invalid_argument&) {
        throw MalformedLine(line_no, "unparsable timestamp '" + fields[3] + "'");
      }
    }
    std::string key = row.user_key + '\t' + row.item_key;
    auto [it, inserted] = seen.try_emplace(std::move(key), rows.size());
    if (inserted) {
      rows.push_back(std::move(row));
    } else if (row.timestamp) {
      auto& kept = rows[it->second];
      if (!kept.timestamp || *row.timestamp < *kept.timestamp) kept.timestamp = row.timestamp;
    }
  }
  if (rows.empty()) throw EmptyFile(source);
  return rows;
}

std::vector<RawInteraction> load_interactions(const std::filesystem::path& path,
                                              Domain domain) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open interaction file " + path.string());
  return parse_interactions(in, domain, path.string());
}

void write_interactions(const std::filesystem::path& path,
                        std::span<const RawInteraction> interactions) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "user_id\titem_id\trating\ttimestamp\n";
  for (const auto& r : interactions) {
    out << r.user_key << '\t' << r.item_key << "\t1\t" << r.timestamp.value_or(0) << '\n';
  }
}

NcoreResult iterative_ncore_filter(std::span<const RawInteraction> inter_a,
                                   std::span<const RawInteraction> inter_b, unsigned n) {
  if (n < 1) throw ConfigError("n-core threshold must be >= 1");
  NcoreResult out;
  out.a.assign(inter_a.begin(), inter_a.end());
  out.b.assign(inter_b.begin(), inter_b.end());

  // One pass is Steps 1-5; repeating makes the result a fixed point of the
  // whole procedure, since Step 5 can push item degrees back below n.
  while (true) {
    bool changed = restrict_to_overlap(out.a, out.b);
    changed |= prune_domain(out.a, n);
    changed |= prune_domain(out.b, n);
    changed |= restrict_to_overlap(out.a, out.b);
    if (out.a.empty() || out.b.empty()) throw ExhaustedDataset(n);
    if (!changed) break;
  }

  std::unordered_set<std::string> emitted;
  for (const auto& r : out.a) {
    if (emitted.insert(r.user_key).second) out.overlap_users.push_back(r.user_key);
  }
  return out;
}

ProcessedDataset build_dataset(const NcoreResult& filtered, unsigned n_core) {
  ProcessedDataset ds;
  ds.n_core = n_core;
  std::unordered_map<std::string, int> user_ids;
  const std::array<const std::vector<RawInteraction>*, 2> sources{&filtered.a, &filtered.b};
  for (const auto* rows : sources) {
    for (const auto& r : *rows) intern(user_ids, ds.user_keys, r.user_key);
  }
  for (Domain d : kDomains) {
    auto& dd = ds.domain(d);
    std::unordered_map<std::string, int> item_ids;
    for (const auto& r : *sources[index(d)]) {
      const int item = intern(item_ids, dd.item_keys, r.item_key);
      dd.interactions.push_back({user_ids.at(r.user_key), item});
    }
  }
  return ds;
}

ProcessedDataset split_dataset(ProcessedDataset ds, const SplitSpec& spec) {
  spec.validate();
  if (ds.domain(Domain::A).interactions.empty() || ds.domain(Domain::B).interactions.empty()) {
    throw TooFewInteractions("cannot split an empty dataset");
  }
  ds.target = spec.target;
  for (Domain d : kDomains) {
    const bool is_target = d == spec.target;
    const Fractions f = is_target
                            ? Fractions{spec.target_train, spec.target_valid, spec.target_test}
                            : Fractions{spec.source_train, spec.source_valid, 0.0};
    // Distinct streams per domain from one user seed.
    const std::uint64_t seed = spec.seed * 0x9E3779B97F4A7C15ULL + index(d) + 1;
    split_domain(ds.domain(d), ds.n_users(), f, seed);
  }
  return ds;
}

DomainStats domain_stats(const ProcessedDataset& ds, Domain d) {
  DomainStats s;
  s.users = ds.n_users();
  s.items = ds.n_items(d);
  s.interactions = ds.domain(d).interactions.size();
  const double cells = static_cast<double>(s.users) * static_cast<double>(s.items);
  s.sparsity = cells > 0 ? 1.0 - static_cast<double>(s.interactions) / cells : 1.0;
  return s;
}

namespace {

void write_keys(const std::filesystem::path& path, const std::string& header,
                const std::vector<std::string>& keys) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << header << '\n';
  for (std::size_t i = 0; i < keys.size(); ++i) out << keys[i] << '\t' << i << '\n';
}

std::vector<std::string> read_keys(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> keys;
  std::string line;
  std::getline(in, line);  // header
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2) throw MalformedLine(line_no, path.string());
    const auto id = static_cast<std::size_t>(std::stoul(fields[1]));
    if (id != keys.size()) throw DataError(path.string() + ": ids must be dense and ordered");
    keys.push_back(fields[0]);
  }
  return keys;
}

}  // namespace

void save_dataset(const ProcessedDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_keys(dir / "users.tsv", "user_key\tuser_id", ds.user_keys);
  for (Domain d : kDomains) {
    const std::string suffix(1, domain_letter(d));
    const auto& dd = ds.domain(d);
    write_keys(dir / ("items_" + suffix + ".tsv"), "item_key\titem_id", dd.item_keys);
    std::ofstream out(dir / ("inter_" + suffix + ".tsv"));
    if (!out) throw DataError("cannot write interactions to " + dir.string());
    out << "user_id\titem_id\tsplit\n";
    for (std::size_t i = 0; i < dd.interactions.size(); ++i) {
      const Split s = dd.splits.empty() ? Split::Train : dd.splits[i];
      out << dd.interactions[i].user << '\t' << dd.interactions[i].item << '\t'
          << split_name(s) << '\n';
    }
  }
  std::ofstream meta(dir / "dataset.meta");
  meta << "n_core=" << ds.n_core << "\ntarget=" << domain_letter(ds.target) << '\n';
}

ProcessedDataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("dataset directory not found: " + dir.string());
  }
  ProcessedDataset ds;
  ds.user_keys = read_keys(dir / "users.tsv");
  for (Domain d : kDomains) {
    const std::string suffix(1, domain_letter(d));
    auto& dd = ds.domain(d);
    dd.item_keys = read_keys(dir / ("items_" + suffix + ".tsv"));
    const auto path = dir / ("inter_" + suffix + ".tsv");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto fields = split_tabs(line);
      if (fields.size() != 3) throw MalformedLine(line_no, path.string());
      UserItem p{std::stoi(fields[0]), std::stoi(fields[1])};
      if (p.user < 0 || p.user >= ds.n_users() || p.item < 0 ||
          p.item >= static_cast<int>(dd.item_keys.size())) {
        throw MalformedLine(line_no, path.string() + ": id out of range");
      }
      dd.interactions.push_back(p);
      dd.splits.push_back(parse_split(fields[2]));
    }
  }
  std::ifstream meta(dir / "dataset.meta");
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    if (key == "n_core") ds.n_core = static_cast<unsigned>(std::stoul(value));
    if (key == "target") ds.target = parse_domain(value);
  }
  return ds;
}

}  // namespace dgcdr
