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
#include <random>

#include "dgcdr/decoder.hpp"
#include "dgcdr/errors.hpp"

using namespace dgcdr;
using namespace dgcdr::diff;

namespace {

Matrix row(std::initializer_list<double> v) {
  Matrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index c = 0;
  for (double x : v) m(0, c++) = x;
  return m;
}

Matrix normal(Eigen::Index r, Eigen::Index c, std::uint64_t seed, double sd = 1.0) {
  Rng rng(seed);
  std::normal_distribution<double> n(0.0, sd);
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = n(rng);
  return m;
}

}  // namespace

TEST_CASE("mapping with a zeroed output layer halves its input") {
  ParameterStore store;
  const auto phi = GateNetwork::create(store, "map", 4, 1);
  phi.output_weight().value.setZero();
  Tape t;
  const Matrix e = normal(3, 4, 2);
  CHECK((map_transfer(t, t.constant(e), phi, 0.0, nullptr).value() - 0.5 * e).cwiseAbs().maxCoeff() <
        1e-15);
  CHECK(map_transfer(t, t.constant(Matrix::Zero(2, 4)), phi, 0.0, nullptr).value().isZero());
  const Matrix big = normal(40, 4, 3);
  CHECK((map_transfer(t, t.constant(big), phi, 0.0, nullptr).value().cwiseAbs().array() <=
         big.cwiseAbs().array())
            .all());
  CHECK_THROWS_AS(map_transfer(t, t.constant(Matrix::Zero(2, 5)), phi, 0.0, nullptr), ShapeMismatch);
}

TEST_CASE("pairwise contrastive closed forms") {
  Tape t;
  const auto anchor = t.constant(row({1, 0}));
  CHECK(pairwise_contrastive(anchor, t.constant(row({0.7, 1})), t.constant(row({0.7, -4})), 0.1)
            .scalar() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(pairwise_contrastive(anchor, t.constant(row({std::log(9.0), 0})), t.constant(row({0, 0})), 1.0)
            .scalar() == doctest::Approx(-std::log(0.9)).epsilon(1e-12));
  CHECK(pairwise_contrastive(anchor, t.constant(row({3, 0})), t.constant(row({0, 1})), 0.1).scalar() <
        std::log(2.0));
}

TEST_CASE("decoder loss is the sum of its four terms") {
  Tape t;
  const auto v = [&](std::uint64_t s) { return t.constant(normal(5, 4, s)); };
  const Var ga = v(1), gb = v(2);
  const TransformedFeatures into_a{v(3), v(4), v(5)};
  const TransformedFeatures into_b{v(6), v(7), v(8)};
  const auto terms = decoder_loss(ga, gb, into_a, into_b, 0.2);
  const double manual = pairwise_contrastive(ga, into_a.shared, into_a.gnn, 0.2).scalar() +
                        pairwise_contrastive(ga, into_a.gnn, into_a.specific, 0.2).scalar() +
                        pairwise_contrastive(gb, into_b.shared, into_b.gnn, 0.2).scalar() +
                        pairwise_contrastive(gb, into_b.gnn, into_b.specific, 0.2).scalar();
  CHECK(terms.total.scalar() == doctest::Approx(manual).epsilon(1e-12));
  CHECK(terms.a_shared_over_gnn.scalar() ==
        doctest::Approx(pairwise_contrastive(ga, into_a.shared, into_a.gnn, 0.2).scalar()));
}

TEST_CASE("identical transformed features give four ln 2") {
  Tape t;
  const Var same = t.constant(normal(4, 3, 1));
  const TransformedFeatures f{same, same, same};
  const auto terms = decoder_loss(t.constant(normal(4, 3, 2)), t.constant(normal(4, 3, 3)), f, f, 0.15);
  CHECK(std::abs(terms.total.scalar() - 4.0 * std::log(2.0)) < 1e-8);
}

TEST_CASE("halving the temperature lowers the loss when gaps are positive") {
  Tape t;
  Matrix g(1, 2), c(1, 2), mid(1, 2), s(1, 2);
  g << 1, 0;
  c << 2, 0;
  mid << 1, 0;
  s << 0, 1;
  const TransformedFeatures f{t.constant(c), t.constant(mid), t.constant(s)};
  const double at = decoder_loss(t.constant(g), t.constant(g), f, f, 0.3).total.scalar();
  const double half = decoder_loss(t.constant(g), t.constant(g), f, f, 0.15).total.scalar();
  CHECK(half < at);
}

TEST_CASE("phi_B only moves features that land in A") {
  ParameterStore store;
  const auto phi_a = GateNetwork::create(store, "A.map", 4, 1);
  const auto phi_b = GateNetwork::create(store, "B.map", 4, 2);
  const Matrix ga = normal(3, 4, 3), gb = normal(3, 4, 4);
  const auto run = [&]() {
    Tape t;
    const auto into_a = transform_from(t, t.constant(gb), t.constant(gb * 0.5), t.constant(gb * 0.2), phi_b, 0.0, nullptr);
    const auto into_b = transform_from(t, t.constant(ga), t.constant(ga * 0.5), t.constant(ga * 0.2), phi_a, 0.0, nullptr);
    return std::make_pair(
        std::vector<Matrix>{into_a.shared.value(), into_a.gnn.value(), into_a.specific.value()},
        std::vector<Matrix>{into_b.shared.value(), into_b.gnn.value(), into_b.specific.value()});
  };
  const auto before = run();
  phi_b.output_bias().value.array() += 0.3;
  const auto after = run();
  for (int k = 0; k < 3; ++k) {
    CHECK(before.first[k] != after.first[k]);
    CHECK(before.second[k] == after.second[k]);
  }
}

TEST_CASE("decoder loss gradient check") {
  ParameterStore store;
  const auto phi_a = GateNetwork::create(store, "A.map", 4, 1);
  const auto phi_b = GateNetwork::create(store, "B.map", 4, 2);
  store.add("ga", normal(5, 4, 3, 0.5));
  store.add("gb", normal(5, 4, 4, 0.5));
  const auto loss = [&](Tape& t) {
    const Var ga = t.param(store.get("ga")), gb = t.param(store.get("gb"));
    const auto into_a = transform_from(t, gb, scale(gb, 0.7), scale(gb, 0.3), phi_b, 0.0, nullptr);
    const auto into_b = transform_from(t, ga, scale(ga, 0.7), scale(ga, 0.3), phi_a, 0.0, nullptr);
    return decoder_loss(ga, gb, into_a, into_b, 0.2).total;
  };
  CHECK(grad_check(loss, store).max_rel_error < 1e-4);
}

TEST_CASE("minimising the decoder loss alone orders shared over gnn over specific") {
  ParameterStore store;
  const auto phi_a = GateNetwork::create(store, "A.map", 6, 1);
  const auto phi_b = GateNetwork::create(store, "B.map", 6, 2);
  const auto gate = [&](const char* name, std::uint64_t seed) {
    return GateNetwork::create(store, name, 6, seed);
  };
  const auto ca = gate("A.c", 3), sa = gate("A.s", 4), cb = gate("B.c", 5), sb = gate("B.s", 6);
  const Matrix ga = normal(16, 6, 7), gb = normal(16, 6, 8);
  AdamState adam;
  adam.lr = 0.01;
  const auto forward = [&](Tape& t) {
    const Var a = t.constant(ga), b = t.constant(gb);
    const Var a_c = ca.gate(t, a, 0.0, nullptr), a_s = sa.gate(t, a, 0.0, nullptr);
    const Var b_c = cb.gate(t, b, 0.0, nullptr), b_s = sb.gate(t, b, 0.0, nullptr);
    const auto into_a = transform_from(t, b, b_c, b_s, phi_b, 0.0, nullptr);
    const auto into_b = transform_from(t, a, a_c, a_s, phi_a, 0.0, nullptr);
    return std::make_tuple(decoder_loss(a, b, into_a, into_b, 0.2).total, into_a, a);
  };
  for (int step = 0; step < 300; ++step) {
    Tape t;
    t.backward(std::get<0>(forward(t)));
    adam_step(store, adam);
  }
  Tape t;
  const auto [loss, into_a, anchor] = forward(t);
  int ordered = 0;
  for (int u = 0; u < 16; ++u) {
    const auto g = anchor.value().row(u);
    const double fc = g.dot(into_a.shared.value().row(u));
    const double fg = g.dot(into_a.gnn.value().row(u));
    const double fs = g.dot(into_a.specific.value().row(u));
    if (fc > fg && fg > fs) ++ordered;
  }
  CHECK(ordered > 8);
}
