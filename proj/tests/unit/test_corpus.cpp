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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dgcdr/corpus.hpp"
#include "dgcdr/errors.hpp"
#include "oracles.hpp"

using namespace dgcdr;

namespace {

std::vector<RawInteraction> parse(const std::string& text, Domain d = Domain::A) {
  std::istringstream in(text);
  return parse_interactions(in, d, "inline");
}

std::vector<RawInteraction> rows(std::initializer_list<std::pair<const char*, const char*>> pairs,
                                 Domain d) {
  std::vector<RawInteraction> out;
  for (const auto& [u, i] : pairs) out.push_back({u, i, d, std::nullopt});
  return out;
}

std::vector<RawInteraction> random_domain(std::mt19937_64& rng, int users, int items, double p,
                                          Domain d) {
  std::bernoulli_distribution keep(p);
  std::vector<RawInteraction> out;
  for (int u = 0; u < users; ++u) {
    for (int i = 0; i < items; ++i) {
      if (keep(rng)) out.push_back({"u" + std::to_string(u), "i" + std::to_string(i), d, {}});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("duplicate pairs collapse to the earliest timestamp") {
  const auto r = parse("user_id\titem_id\trating\ttimestamp\nu1\ti1\t5\t30\nu1\ti1\t4\t10\nu2\ti3\t1\t7\n");
  REQUIRE(r.size() == 2);
  CHECK(r[0].user_key == "u1");
  CHECK(r[0].timestamp == 10);
  CHECK(r[1].item_key == "i3");
}

TEST_CASE("empty input is rejected") {
  CHECK_THROWS_AS(parse(""), EmptyFile);
  CHECK_THROWS_AS(parse("user_id\titem_id\n\n"), EmptyFile);
}

TEST_CASE("a short row among longer rows is malformed at its line") {
  try {
    parse("u1\ti1\t5\nu2\ti2\nu3\ti3\t1\n");
    FAIL("expected MalformedLine");
  } catch (const MalformedLine& e) {
    CHECK(e.line_no() == 2);
  }
}

TEST_CASE("two-column files and missing files") {
  const auto r = parse("a\tb\nc\td\n", Domain::B);
  CHECK(r.size() == 2);
  CHECK(r[1].domain == Domain::B);
  CHECK_THROWS_AS(load_interactions("/nonexistent/path.tsv", Domain::A), DataError);
}

TEST_CASE("n-core cascade can exhaust a domain") {
  const auto a = rows({{"u1", "i1"}, {"u1", "i2"}, {"u2", "i1"}}, Domain::A);
  CHECK_THROWS_AS(iterative_ncore_filter(a, a, 2), ExhaustedDataset);
}

TEST_CASE("complete 2x2 blocks are already a fixed point") {
  const auto a = rows({{"u1", "i1"}, {"u1", "i2"}, {"u2", "i1"}, {"u2", "i2"}}, Domain::A);
  const auto b = rows({{"u1", "j1"}, {"u1", "j2"}, {"u2", "j1"}, {"u2", "j2"}}, Domain::B);
  const auto r = iterative_ncore_filter(a, b, 2);
  CHECK(r.a.size() == 4);
  CHECK(r.b.size() == 4);
  CHECK(r.overlap_users == std::vector<std::string>{"u1", "u2"});
}

TEST_CASE("n-core filter matches the brute-force oracle on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_domain(rng, 30, 40, 0.15, Domain::A);
    const auto b = random_domain(rng, 30, 40, 0.15, Domain::B);
    const auto [oa, ob] = oracle::ncore(oracle::to_pairs(a), oracle::to_pairs(b), 3);
    if (oa.empty() || ob.empty()) {
      CHECK_THROWS_AS(iterative_ncore_filter(a, b, 3), ExhaustedDataset);
      continue;
    }
    const auto r = iterative_ncore_filter(a, b, 3);
    CHECK(oracle::to_pairs(r.a) == oa);
    CHECK(oracle::to_pairs(r.b) == ob);
    const auto again = iterative_ncore_filter(r.a, r.b, 3);
    CHECK(oracle::to_pairs(again.a) == oa);
    CHECK(oracle::to_pairs(again.b) == ob);
  }
}

TEST_CASE("dense ids follow first appearance and every user overlaps") {
  const auto a = rows({{"x", "i1"}, {"y", "i2"}, {"x", "i2"}, {"y", "i1"}}, Domain::A);
  const auto b = rows({{"y", "j1"}, {"x", "j1"}, {"y", "j2"}, {"x", "j2"}}, Domain::B);
  const auto ds = build_dataset(iterative_ncore_filter(a, b, 2), 2);
  CHECK(ds.user_keys == std::vector<std::string>{"x", "y"});
  CHECK(ds.domain(Domain::A).item_keys == std::vector<std::string>{"i1", "i2"});
  CHECK(ds.n_items(Domain::B) == 2);
  CHECK(ds.user_items(Domain::A)[0] == std::vector<int>{0, 1});
}

TEST_CASE("split sizes follow the fractions") {
  std::vector<RawInteraction> a, b;
  // 10 target interactions on a 2 x 5 complete block.
  for (int u = 0; u < 2; ++u) {
    for (int i = 0; i < 5; ++i) {
      a.push_back({"u" + std::to_string(u), "i" + std::to_string(i), Domain::A, {}});
      b.push_back({"u" + std::to_string(u), "j" + std::to_string(i), Domain::B, {}});
    }
  }
  auto ds = build_dataset(iterative_ncore_filter(a, b, 2), 2);
  SplitSpec spec;
  spec.seed = 3;
  const auto split = split_dataset(ds, spec);
  CHECK(split.pairs(Domain::A, Split::Train).size() == 6);
  CHECK(split.pairs(Domain::A, Split::Valid).size() == 2);
  CHECK(split.pairs(Domain::A, Split::Test).size() == 2);
  CHECK(split.pairs(Domain::B, Split::Train).size() == 8);
  CHECK(split.pairs(Domain::B, Split::Valid).size() == 2);
  CHECK(split.pairs(Domain::B, Split::Test).empty());
  CHECK(split_dataset(ds, spec).domain(Domain::A).splits == split.domain(Domain::A).splits);
}

TEST_CASE("every user and item keeps a train interaction") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_domain(rng, 15, 12, 0.5, Domain::A);
    const auto b = random_domain(rng, 15, 12, 0.5, Domain::B);
    SplitSpec spec;
    spec.seed = static_cast<std::uint64_t>(trial);
    const auto ds = split_dataset(build_dataset(iterative_ncore_filter(a, b, 2), 2), spec);
    for (Domain d : kDomains) {
      const auto train = ds.user_items(d, {Split::Train});
      for (const auto& items : train) CHECK_FALSE(items.empty());
      std::vector<int> item_deg(static_cast<std::size_t>(ds.n_items(d)), 0);
      for (const auto& p : ds.pairs(d, Split::Train)) ++item_deg[p.item];
      for (int deg : item_deg) CHECK(deg > 0);
      // Labels partition the interactions.
      std::size_t total = 0;
      for (Split s : {Split::Train, Split::Valid, Split::Test}) total += ds.pairs(d, s).size();
      CHECK(total == ds.domain(d).interactions.size());
    }
  }
}

TEST_CASE("a bucket that would be empty is rejected") {
  const auto a = rows({{"u1", "i1"}, {"u2", "i1"}}, Domain::A);
  const auto b = rows({{"u1", "j1"}, {"u2", "j1"}}, Domain::B);
  auto ds = build_dataset(iterative_ncore_filter(a, b, 1), 1);
  CHECK_THROWS_AS(split_dataset(ds, SplitSpec{}), TooFewInteractions);
}

TEST_CASE("split fractions must each lie in (0,1) and sum to one") {
  SplitSpec spec;
  spec.target_train = 0.7;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = {};
  spec.source_valid = 0.0;
  spec.source_train = 1.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("dataset export round-trips byte for byte") {
  const auto ds = oracle::toy_dataset(12, 15, 4);
  const auto root = std::filesystem::temp_directory_path() / "dgcdr_corpus_rt";
  std::filesystem::remove_all(root);
  save_dataset(ds, root / "one");
  const auto back = load_dataset(root / "one");
  save_dataset(back, root / "two");
  for (const char* name : {"users.tsv", "items_A.tsv", "items_B.tsv", "inter_A.tsv", "inter_B.tsv",
                           "dataset.meta"}) {
    std::ifstream x(root / "one" / name), y(root / "two" / name);
    std::stringstream sx, sy;
    sx << x.rdbuf();
    sy << y.rdbuf();
    CHECK_MESSAGE(sx.str() == sy.str(), name);
  }
  CHECK(back.user_keys == ds.user_keys);
  CHECK(back.domain(Domain::B).splits == ds.domain(Domain::B).splits);
  CHECK(back.target == ds.target);
  CHECK_THROWS_AS(load_dataset(root / "missing"), DataError);
  std::filesystem::remove_all(root);
}

TEST_CASE("statistics report sparsity") {
  const auto ds = oracle::toy_dataset(10, 12, 9);
  const auto s = domain_stats(ds, Domain::A);
  CHECK(s.users == ds.n_users());
  CHECK(s.sparsity == doctest::Approx(1.0 - static_cast<double>(s.interactions) /
                                                (static_cast<double>(s.users) * s.items)));
}
