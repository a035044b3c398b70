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
#include "dgcdr/synth.hpp"
#include "oracles.hpp"

using namespace dgcdr;

namespace {

double correlation(const diff::Matrix& x, const diff::Matrix& y) {
  const double mx = x.mean(), my = y.mean();
  const auto dx = (x.array() - mx), dy = (y.array() - my);
  return (dx * dy).sum() / std::sqrt(dx.square().sum() * dy.square().sum());
}

SynthSpec base() {
  SynthSpec s;
  s.n_users = 80;
  s.n_items = {90, 90};
  s.density = 0.08;
  s.n_core = 3;
  s.seed = 4;
  return s;
}

}  // namespace

TEST_CASE("generated data passes the n-core check in both domains") {
  const auto spec = base();
  const auto data = generate(spec);
  const auto filtered = iterative_ncore_filter(data.interactions[0], data.interactions[1], spec.n_core);
  CHECK(filtered.a.size() == data.interactions[0].size());
  CHECK(filtered.b.size() == data.interactions[1].size());
  CHECK(filtered.overlap_users.size() == static_cast<std::size_t>(spec.n_users));
  const double density = static_cast<double>(data.interactions[0].size()) / (80.0 * 90.0);
  CHECK(std::abs(density - spec.density) < 0.3 * spec.density);
}

TEST_CASE("same seed, same output") {
  const auto a = generate(base()), b = generate(base());
  CHECK(oracle::to_pairs(a.interactions[0]) == oracle::to_pairs(b.interactions[0]));
  CHECK(a.logits[1] == b.logits[1]);
  auto other = base();
  other.seed = 5;
  CHECK(oracle::to_pairs(generate(other).interactions[0]) != oracle::to_pairs(a.interactions[0]));
}

TEST_CASE("no shared weight leaves the domains uncorrelated") {
  auto spec = base();
  spec.shared_weight = 0.0;
  const auto d = generate(spec);
  CHECK(std::abs(correlation(d.logits[0], d.logits[1])) < 0.05);
  spec.shared_weight = 1.0;
  spec.specific_weight = 0.5;
  const auto s = generate(spec);
  CHECK(correlation(s.logits[0], s.logits[1]) > 0.5);
}

TEST_CASE("no specific weight makes the domains identical") {
  auto spec = base();
  spec.specific_weight = 0.0;
  const auto d = generate(spec);
  CHECK((d.logits[0] - d.logits[1]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unreachable densities are rejected") {
  auto spec = base();
  spec.density = 0.01;  // fewer than n_core interactions per user on average
  CHECK_THROWS_AS(generate(spec), DensityUnreachable);
  spec.density = 1.0;
  CHECK_THROWS_AS(generate(spec), DensityUnreachable);
  spec = base();
  spec.n_users = 0;
  CHECK_THROWS_AS(generate(spec), ConfigError);
}
