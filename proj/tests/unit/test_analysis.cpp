/*
 * Copyright 2026 The onebp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <onebp/analysis.hpp>
#include <onebp/error.hpp>
#include <onebp/eval.hpp>

#include "oracles.hpp"

#include <limits>
#include <sstream>

using namespace onebp;

namespace {

bool non_increasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] > xs[i - 1] * (1 + 1e-12) + 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("single cluster is the mean") {
  const std::vector<double> pts{0, 0, 2, 0, 4, 3};
  const auto c = kmeans(pts, 2, 1, 10, 1);
  CHECK(c.centroid(0)[0] == doctest::Approx(2.0));
  CHECK(c.centroid(0)[1] == doctest::Approx(1.0));
  // total variance * N = sum of squared deviations
  CHECK(c.inertia == doctest::Approx((4 + 1) + (0 + 1) + (4 + 4)));
}

TEST_CASE("duplicated locations give pure clusters") {
  std::vector<double> pts;
  const double locs[][2] = {{0, 0}, {5, 5}, {-7, 2}, {3, -9}};
  for (int rep = 0; rep < 3; ++rep)
    for (const auto& l : locs) pts.insert(pts.end(), {l[0], l[1]});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = kmeans(pts, 2, 4, 50, seed);
    CHECK(c.inertia == 0.0);
    for (std::size_t i = 0; i < 12; ++i) CHECK(c.assignments[i] == c.assignments[i % 4]);
  }
}

TEST_CASE("two separated pairs") {
  const std::vector<double> pts{0, 0, 0, 1, 10, 0, 10, 1};
  // Exhaustive oracle over every two-way labelling.
  double best = std::numeric_limits<double>::infinity();
  unsigned best_mask = 0;
  for (unsigned mask = 1; mask < 15; ++mask) {
    double total = 0;
    for (const unsigned side : {0u, 1u}) {
      double sx = 0, sy = 0;
      int n = 0;
      for (int i = 0; i < 4; ++i) {
        if (((mask >> i) & 1u) == side) { sx += pts[2 * i]; sy += pts[2 * i + 1]; ++n; }
      }
      for (int i = 0; i < 4; ++i) {
        if (((mask >> i) & 1u) == side) {
          total += std::pow(pts[2 * i] - sx / n, 2) + std::pow(pts[2 * i + 1] - sy / n, 2);
        }
      }
    }
    if (total < best) { best = total; best_mask = mask; }
  }
  CHECK((best_mask == 0b1100u || best_mask == 0b0011u));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = kmeans(pts, 2, 2, 20, seed);
    CHECK(c.assignments[0] == c.assignments[1]);
    CHECK(c.assignments[2] == c.assignments[3]);
    CHECK(c.assignments[0] != c.assignments[2]);
    CHECK(c.inertia == doctest::Approx(best));
    const auto left = c.centroid(c.assignments[0]);
    const auto right = c.centroid(c.assignments[2]);
    CHECK(left[0] == doctest::Approx(0.0));
    CHECK(left[1] == doctest::Approx(0.5));
    CHECK(right[0] == doctest::Approx(10.0));
    CHECK(right[1] == doctest::Approx(0.5));
  }
}

TEST_CASE("inertia never increases and centroids are member means") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_n(5, 60), pick_d(1, 5), pick_k(1, 5);
    const std::size_t n = pick_n(rng), d = pick_d(rng), k = pick_k(rng);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> pts(n * d);
    for (auto& x : pts) x = g(rng);
    const auto c = kmeans(pts, d, k, 100, seed);
    CHECK(non_increasing(c.inertia_history));
    CHECK(c.assignments.size() == n);
    std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(c.assignments[i] < k);
      ++counts[c.assignments[i]];
      for (std::size_t t = 0; t < d; ++t) sums[c.assignments[i]][t] += pts[i * d + t];
    }
    if (c.iterations < 100) {  // converged, so the means are current
      for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] == 0) continue;
        for (std::size_t t = 0; t < d; ++t) {
          CHECK(c.centroid(j)[t] == doctest::Approx(sums[j][t] / double(counts[j])));
        }
      }
    }
    CHECK(c.inertia <= c.inertia_history.back() * (1 + 1e-12) + 1e-12);
  }
}

TEST_CASE("kmeans is deterministic and validates input") {
  std::vector<double> pts(40);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 1);
  for (auto& x : pts) x = g(rng);
  const auto a = kmeans(pts, 4, 3, 30, 5);
  const auto b = kmeans(pts, 4, 3, 30, 5);
  CHECK(a.assignments == b.assignments);
  CHECK(a.centroids == b.centroids);
  CHECK_THROWS_AS(kmeans(pts, 4, 11, 30, 5), Error);
  CHECK_THROWS_AS(kmeans(pts, 3, 2, 30, 5), Error);
  CHECK_THROWS_AS(kmeans(pts, 4, 0, 30, 5), Error);
}

namespace {

// d = 1 model: item j scores item_scores[j] for every user.
EmbeddingModel scalar_model(std::size_t users, const std::vector<float>& item_scores) {
  EmbeddingModel m{EmbeddingMatrix(users, 1), EmbeddingMatrix(item_scores.size(), 1)};
  for (auto& x : m.users.values()) x = 1.0f;
  std::copy(item_scores.begin(), item_scores.end(), m.items.values().begin());
  return m;
}

Clustering labelled(std::vector<std::size_t> assignments, std::size_t k) {
  Clustering c;
  c.k = k;
  c.dim = 1;
  c.assignments = std::move(assignments);
  c.centroids.assign(k, 0.0);
  return c;
}

}  // namespace

TEST_CASE("one cluster reproduces the global metrics") {
  std::mt19937_64 rng(2);
  const auto data = testing::random_dataset(12, 30, 0.3, rng, 3, 10);
  const auto split = split_holdout(data, 0.3, 1);
  const auto model = init_model(12, 30, 4, 9);
  const auto one = labelled(std::vector<std::size_t>(30, 0), 1);
  const std::size_t k[] = {5};
  for (const auto u : split.evaluable_users) {
    const auto report = cluster_report(one, split, model, u, 5);
    const auto eval = evaluate(model, DataSplit{split.train, split.test, {u}}, k);
    CHECK(report.clusters[0].share == 1.0);
    CHECK(*report.clusters[0].precision == doctest::Approx(eval.precision.at(5)));
    CHECK(*report.clusters[0].recall == doctest::Approx(eval.recall.at(5)));
  }
  const auto all = cluster_report(one, split, model, std::nullopt, 5);
  CHECK(all.clusters[0].share == 1.0);
  CHECK(*all.clusters[0].precision == doctest::Approx(evaluate(model, split, k).precision.at(5)));
  CHECK(all.clusters[0].recommended == 5 * split.evaluable_users.size());
}

TEST_CASE("even split across two clusters") {
  std::vector<float> scores(20);
  for (std::size_t j = 0; j < 20; ++j) scores[j] = float(20 - j);
  const auto model = scalar_model(1, scores);
  std::vector<std::size_t> parity(20);
  for (std::size_t j = 0; j < 20; ++j) parity[j] = j % 2;
  const auto split = make_split(InteractionDataset(1, 20, {{0, 19}}), InteractionDataset(1, 20, {{0, 18}}));
  const auto r = cluster_report(labelled(parity, 2), split, model, UserIndex{0}, 10);
  CHECK(r.clusters[0].share == 0.5);
  CHECK(r.clusters[1].share == 0.5);
}

TEST_CASE("hand-bucketed report") {
  // Six items; cluster A = {0, 1, 2}, B = {3, 4, 5}. Scores rank 5,0,3,1,4,2.
  const auto model = scalar_model(2, {9, 7, 1, 8, 5, 10});
  const auto clusters = labelled({0, 0, 0, 1, 1, 1}, 2);
  // user 0 saw item 5 in train; test {0, 4}. top-3 = [0, 3, 1] -> A, B, A.
  // user 1 saw item 0 in train; test {2, 3}. top-3 = [5, 3, 1] -> B, B, A.
  const auto split = make_split(InteractionDataset(2, 6, {{0, 5}, {1, 0}}),
                                InteractionDataset(2, 6, {{0, 0}, {0, 4}, {1, 2}, {1, 3}}));
  const auto one = cluster_report(clusters, split, model, UserIndex{0}, 3);
  CHECK(one.clusters[0].recommended == 2);
  CHECK(one.clusters[0].hits == 1);
  CHECK(one.clusters[0].test_items == 1);
  CHECK(one.clusters[1].recommended == 1);
  CHECK(one.clusters[1].hits == 0);
  CHECK(one.clusters[1].test_items == 1);
  CHECK(one.clusters[0].share == doctest::Approx(2.0 / 3.0));
  CHECK(*one.clusters[0].precision == doctest::Approx(0.5));
  CHECK(*one.clusters[0].recall == doctest::Approx(1.0));
  CHECK(*one.clusters[1].precision == 0.0);
  CHECK(*one.clusters[1].recall == 0.0);

  const auto all = cluster_report(clusters, split, model, std::nullopt, 3);
  CHECK(all.clusters[0].recommended == 3);
  CHECK(all.clusters[1].recommended == 3);
  CHECK(all.clusters[0].hits == 1);
  CHECK(all.clusters[1].hits == 1);
  CHECK(all.clusters[0].test_items == 2);
  CHECK(all.clusters[1].test_items == 2);
  CHECK(*all.clusters[1].precision == doctest::Approx(1.0 / 3.0));
  CHECK(*all.clusters[1].recall == doctest::Approx(0.5));
  double share = 0;
  for (const auto& c : all.clusters) share += c.share;
  CHECK(std::abs(share - 1.0) <= 1e-9);
}

TEST_CASE("undefined ratios serialize as null") {
  const auto model = scalar_model(1, {3, 2, 1, 0});
  const auto split = make_split(InteractionDataset(1, 4, {{0, 3}}), InteractionDataset(1, 4, {{0, 0}}));
  const auto r = cluster_report(labelled({0, 0, 1, 1}, 3), split, model, UserIndex{0}, 2);
  CHECK_FALSE(r.clusters[1].recall.has_value());
  CHECK_FALSE(r.clusters[2].precision.has_value());
  const auto j = to_json(r);
  CHECK(j["1"]["recall"].is_null());
  CHECK(j["2"]["precision"].is_null());
  CHECK(j["0"]["share"] == 1.0);
}

TEST_CASE("items_clustered csv") {
  const auto model = scalar_model(1, {1.5f, -2});
  std::ostringstream out;
  write_items_clustered_csv(out, labelled({1, 0}, 2), model);
  CHECK(out.str() == "item,cluster,dim0\n0,1,1.5\n1,0,-2\n");
}
