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
#include <onebp/model.hpp>

#include <cmath>
#include <limits>
#include <sstream>

using namespace onebp;

namespace {

EmbeddingModel hand_model(std::vector<std::vector<float>> users,
                          std::vector<std::vector<float>> items) {
  const std::size_t d = users.front().size();
  EmbeddingModel m{EmbeddingMatrix(users.size(), d), EmbeddingMatrix(items.size(), d)};
  for (std::size_t i = 0; i < users.size(); ++i)
    std::copy(users[i].begin(), users[i].end(), m.users.row(i).begin());
  for (std::size_t i = 0; i < items.size(); ++i)
    std::copy(items[i].begin(), items[i].end(), m.items.row(i).begin());
  return m;
}

}  // namespace

TEST_CASE("init is deterministic per seed") {
  CHECK(init_model(10, 12, 8, 3) == init_model(10, 12, 8, 3));
  CHECK_FALSE(init_model(10, 12, 8, 3) == init_model(10, 12, 8, 4));
}

TEST_CASE("init draws N(0, 0.1^2)") {
  const auto m = init_model(1000, 1000, 64, 1);
  double sum = 0, sq = 0;
  std::size_t n = 0;
  for (const auto* table : {&m.users, &m.items}) {
    for (const float x : table->values()) {
      sum += x;
      sq += double(x) * x;
      ++n;
    }
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) <= 0.002);
  CHECK(std::abs(sd - 0.1) <= 0.005);
}

TEST_CASE("minimal shape") {
  const auto m = init_model(1, 1, 1, 9);
  CHECK(m.users.rows() == 1);
  CHECK(m.items.rows() == 1);
  CHECK(m.dim() == 1);
  CHECK_THROWS_AS(init_model(0, 1, 1, 1), Error);
}

TEST_CASE("score is a dot product") {
  const auto m = hand_model({{1, 0}, {1, 2}, {0, 0}}, {{1, 0}, {3, -1}});
  CHECK(score(m, 0, 0) == 1.0);
  CHECK(score(m, 1, 1) == 1.0);
  CHECK(score(m, 2, 1) == 0.0);
  CHECK_THROWS_AS(score(m, 3, 0), Error);
  CHECK_THROWS_AS(score(m, 0, 2), Error);
}

TEST_CASE("score_all_items") {
  const auto m = hand_model({{1, 2}, {0, 0}}, {{1, 1}, {-1, 0.5f}, {2, -3}});
  CHECK(score_all_items(m, 0) == std::vector<double>{3.0, 0.0, -4.0});
  CHECK(score_all_items(m, 1) == std::vector<double>{0.0, 0.0, 0.0});
  const auto r = init_model(5, 17, 6, 2);
  for (UserIndex u = 0; u < 5; ++u) {
    const auto all = score_all_items(r, u);
    for (ItemIndex j = 0; j < 17; ++j) CHECK(all[j] == score(r, u, j));
  }
}

TEST_CASE("score is linear in the user row") {
  auto m = init_model(4, 6, 5, 11);
  const double before = score(m, 2, 3);
  for (auto& x : m.users.row(2)) x *= 4.0f;  // power of two keeps it exact
  CHECK(score(m, 2, 3) == doctest::Approx(4.0 * before).epsilon(1e-12));
}

TEST_CASE("binary dump round trips and has the documented layout") {
  const auto m = hand_model({{1.5f, -2}}, {{0.25f, 3}, {-1, 0}});
  std::stringstream buf;
  save_binary(buf, m);
  const std::string bytes = buf.str();
  REQUIRE(bytes.size() == 4 + 24 + 4 * (2 + 4));
  CHECK(bytes.substr(0, 4) == "OBP1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);   // M, little-endian
  CHECK(static_cast<unsigned char>(bytes[12]) == 2);  // N
  CHECK(static_cast<unsigned char>(bytes[20]) == 2);  // d
  // 1.5f = 0x3FC00000
  CHECK(static_cast<unsigned char>(bytes[28]) == 0x00);
  CHECK(static_cast<unsigned char>(bytes[30]) == 0xC0);
  CHECK(static_cast<unsigned char>(bytes[31]) == 0x3F);
  CHECK(load_binary(buf) == m);

  const auto r = init_model(7, 9, 3, 5);
  std::stringstream buf2;
  save_binary(buf2, r);
  CHECK(load_binary(buf2) == r);
}

TEST_CASE("binary loader rejects garbage") {
  std::stringstream bad("NOPE");
  CHECK_THROWS_AS(load_binary(bad), Error);
  std::stringstream truncated(std::string("OBP1") + std::string(24, '\1'));
  CHECK_THROWS_AS(load_binary(truncated), Error);
}

TEST_CASE("embedding csv layout") {
  const auto m = hand_model({{1, 0.5f}}, {{-2, 0}});
  std::ostringstream out;
  write_embeddings_csv(out, m);
  CHECK(out.str() == "entity,index,dim0,dim1\nuser,0,1,0.5\nitem,0,-2,0\n");
}

TEST_CASE("all_finite") {
  std::vector<float> v{1, 2, 3};
  CHECK(all_finite(v));
  v[1] = std::numeric_limits<float>::quiet_NaN();
  CHECK_FALSE(all_finite(v));
  v[1] = std::numeric_limits<float>::infinity();
  CHECK_FALSE(all_finite(v));
}
