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

#include <onebp/error.hpp>
#include <onebp/sampler.hpp>

#include "oracles.hpp"

#include <set>

using namespace onebp;

TEST_CASE("forced complement") {
  const InteractionDataset ds(1, 5, {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    CHECK(sample_negatives(ds, 0, 1, rng) == std::vector<ItemIndex>{4});
  }
}

TEST_CASE("infeasible draws are errors") {
  const InteractionDataset ds(2, 3, {{0, 0}, {0, 1}, {0, 2}, {1, 0}});
  Rng rng(1);
  CHECK_THROWS_AS(sample_negatives(ds, 0, 1, rng), Error);
  CHECK_THROWS_AS(sample_negatives(ds, 1, 3, rng), Error);
  CHECK_THROWS_AS(sample_negatives(ds, 1, 0, rng), Error);
  CHECK(sample_negatives(ds, 1, 2, rng).size() == 2);
}

TEST_CASE("draws avoid the adjacency and are distinct") {
  std::mt19937_64 gen(3);
  const auto ds = testing::random_dataset(30, 40, 0.5, gen, 1, 8);
  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    for (UserIndex u = 0; u < ds.num_users(); ++u) {
      for (const std::size_t n : {1u, 3u, 8u}) {
        const auto draw = sample_negatives(ds, u, n, rng);
        CHECK(draw.size() == n);
        CHECK(std::set<ItemIndex>(draw.begin(), draw.end()).size() == n);
        for (const auto j : draw) CHECK_FALSE(ds.contains(u, j));
      }
    }
  }
}

TEST_CASE("same seed and call sequence give the same draws") {
  std::mt19937_64 gen(4);
  const auto ds = testing::random_dataset(10, 25, 0.4, gen, 1, 6);
  Rng a(77), b(77);
  for (UserIndex u = 0; u < 10; ++u) {
    CHECK(sample_negatives(ds, u, 5, a) == sample_negatives(ds, u, 5, b));
  }
}

TEST_CASE("rejection path is uniform over the complement") {
  std::vector<Interaction> pairs;
  for (ItemIndex j = 0; j < 10; ++j) pairs.push_back({0, j * 97});
  const InteractionDataset ds(1, 1000, pairs);
  Rng rng(2024);
  std::vector<std::size_t> counts(1000, 0);
  const std::size_t draws = 100000, n = 5;
  for (std::size_t i = 0; i < draws; ++i) {
    for (const auto j : sample_negatives(ds, 0, n, rng)) ++counts[j];
  }
  const double expected = double(draws * n) / 990.0;
  for (ItemIndex j = 0; j < 1000; ++j) {
    if (ds.contains(0, j)) {
      CHECK(counts[j] == 0);
    } else {
      CHECK(std::abs(double(counts[j]) - expected) <= 0.2 * expected);
    }
  }
}

TEST_CASE("enumeration path is uniform over the complement") {
  // 6 free items, n = 4 < 2n forces the complement enumeration branch.
  std::vector<Interaction> pairs;
  for (ItemIndex j = 0; j < 14; ++j) pairs.push_back({0, j});
  const InteractionDataset ds(1, 20, pairs);
  Rng rng(5);
  std::vector<std::size_t> counts(20, 0);
  const std::size_t draws = 30000;
  for (std::size_t i = 0; i < draws; ++i) {
    const auto d = sample_negatives(ds, 0, 4, rng);
    CHECK(std::set<ItemIndex>(d.begin(), d.end()).size() == 4);
    for (const auto j : d) ++counts[j];
  }
  const double expected = draws * 4.0 / 6.0;
  for (ItemIndex j = 14; j < 20; ++j) {
    CHECK(std::abs(double(counts[j]) - expected) <= 0.05 * expected);
  }
}
