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

#include "dgcdr/errors.hpp"
#include "dgcdr/graph.hpp"
#include "oracles.hpp"

using namespace dgcdr;

TEST_CASE("hand-computed neighbourhoods and norms") {
  const std::vector<UserItem> pairs{{0, 0}, {0, 1}, {1, 0}};
  const auto g = BipartiteGraph::from_pairs(2, 2, pairs);
  CHECK(std::vector<int>(g.user_neighbors(0).begin(), g.user_neighbors(0).end()) ==
        std::vector<int>{0, 1});
  CHECK(std::vector<int>(g.item_neighbors(0).begin(), g.item_neighbors(0).end()) ==
        std::vector<int>{0, 1});
  CHECK(g.norm(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.norm(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(g.norm(1, 1) == 0.0);
}

TEST_CASE("a single edge has unit norm") {
  const std::vector<UserItem> pairs{{0, 0}};
  CHECK(BipartiteGraph::from_pairs(1, 1, pairs).norm(0, 0) == 1.0);
}

TEST_CASE("train-split graph is symmetric, normalised and deterministic") {
  const auto ds = oracle::toy_dataset(20, 25, 3);
  for (Domain d : kDomains) {
    const auto g = build_graph(ds, d);
    CHECK(g == build_graph(ds, d));
    CHECK(g.num_edges() == ds.pairs(d, Split::Train).size());
    std::size_t from_users = 0, from_items = 0;
    for (int u = 0; u < g.n_users(); ++u) {
      const auto nb = g.user_neighbors(u);
      const auto nm = g.user_norms(u);
      from_users += nb.size();
      CHECK(std::is_sorted(nb.begin(), nb.end()));
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const auto inb = g.item_neighbors(nb[k]);
        CHECK(std::binary_search(inb.begin(), inb.end(), u));
        const double expect =
            1.0 / std::sqrt(static_cast<double>(nb.size()) * static_cast<double>(inb.size()));
        CHECK(std::abs(nm[k] - expect) < 1e-12);
        CHECK(g.norm(u, nb[k]) == nm[k]);
      }
    }
    for (int i = 0; i < g.n_items(); ++i) {
      from_items += g.item_neighbors(i).size();
      const auto nb = g.item_neighbors(i);
      const auto nm = g.item_norms(i);
      for (std::size_t k = 0; k < nb.size(); ++k) CHECK(nm[k] == g.norm(nb[k], i));
    }
    CHECK(from_users == g.num_edges());
    CHECK(from_items == g.num_edges());
    // Held-out pairs are absent.
    for (const auto& p : ds.pairs(d, Split::Valid)) CHECK(g.norm(p.user, p.item) == 0.0);
  }
}

TEST_CASE("isolated nodes are reported") {
  ProcessedDataset ds;
  ds.user_keys = {"a", "b"};
  for (Domain d : kDomains) {
    ds.domain(d).item_keys = {"x", "y"};
    ds.domain(d).interactions = {{0, 0}, {1, 0}, {1, 1}};
    ds.domain(d).splits = {Split::Train, Split::Train, Split::Valid};
  }
  CHECK_THROWS_AS(build_graph(ds, Domain::A), IsolatedNode);
}
