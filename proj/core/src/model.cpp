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

#include <onebp/model.hpp>
#include <onebp/error.hpp>
#include <onebp/format.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

namespace onebp {

EmbeddingModel init_model(std::size_t num_users,
                          std::size_t num_items,
                          std::size_t dim,
                          std::uint64_t seed) {
  if (num_users == 0 || num_items == 0 || dim == 0) {
    throw Error("init_model needs positive M, N and d");
  }
  EmbeddingModel model{EmbeddingMatrix(num_users, dim),
                       EmbeddingMatrix(num_items, dim)};
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 0.1);
  for (auto& x : model.users.values()) x = static_cast<float>(normal(gen));
  for (auto& x : model.items.values()) x = static_cast<float>(normal(gen));
  return model;
}

double dot(std::span<const float> a, std::span<const float> b) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

double score(const EmbeddingModel& model, UserIndex user, ItemIndex item) {
  if (user >= model.num_users() || item >= model.num_items()) {
    throw Error("score: index (" + std::to_string(user) + ", " +
                std::to_string(item) + ") out of range");
  }
  return dot(model.users.row(user), model.items.row(item));
}

void score_all_items_into(const EmbeddingModel& model,
                          UserIndex user,
                          std::span<double> out) noexcept {
  const auto u = model.users.row(user);
  for (std::size_t j = 0; j < model.num_items(); ++j) {
    out[j] = dot(u, model.items.row(j));
  }
}

std::vector<double> score_all_items(const EmbeddingModel& model,
                                    UserIndex user) {
  if (user >= model.num_users()) {
    throw Error("score_all_items: user " + std::to_string(user) + " out of range");
  }
  std::vector<double> out(model.num_items());
  score_all_items_into(model, user, out);
  return out;
}

bool all_finite(std::span<const float> values) noexcept {
  for (const float x : values) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

namespace {

constexpr std::array<char, 4> kMagic{'O', 'B', 'P', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error("checkpoint truncated in header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes[i]} << (8 * i);
  return v;
}

void put_matrix(std::ostream& out, const EmbeddingMatrix& m) {
  std::vector<char> buf(m.values().size() * 4);
  std::size_t pos = 0;
  for (const float x : m.values()) {
    const auto bits = std::bit_cast<std::uint32_t>(x);
    for (int i = 0; i < 4; ++i) buf[pos++] = static_cast<char>((bits >> (8 * i)) & 0xff);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void get_matrix(std::istream& in, EmbeddingMatrix& m) {
  std::vector<unsigned char> buf(m.values().size() * 4);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) throw Error("checkpoint truncated in matrix data");
  std::size_t pos = 0;
  for (auto& x : m.values()) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= std::uint32_t{buf[pos++]} << (8 * i);
    x = std::bit_cast<float>(bits);
  }
}

}  // namespace

void save_binary(std::ostream& out, const EmbeddingModel& model) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, model.num_users());
  put_u64(out, model.num_items());
  put_u64(out, model.dim());
  put_matrix(out, model.users);
  put_matrix(out, model.items);
  if (!out) throw Error("failed writing checkpoint");
}

EmbeddingModel load_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error("not an OBP1 checkpoint");
  const auto m = get_u64(in);
  const auto n = get_u64(in);
  const auto d = get_u64(in);
  if (m == 0 || n == 0 || d == 0 || m > (1ULL << 32) || n > (1ULL << 32) ||
      d > (1ULL << 20)) {
    throw Error("checkpoint header holds an implausible shape");
  }
  EmbeddingModel model{EmbeddingMatrix(m, d), EmbeddingMatrix(n, d)};
  get_matrix(in, model.users);
  get_matrix(in, model.items);
  return model;
}

void write_embeddings_csv(std::ostream& out, const EmbeddingModel& model) {
  out << "entity,index";
  for (std::size_t k = 0; k < model.dim(); ++k) out << ",dim" << k;
  out << '\n';
  const auto dump = [&out](const char* entity, const EmbeddingMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      out << entity << ',' << i;
      for (const float x : m.row(i)) out << ',' << format_real(x);
      out << '\n';
    }
  };
  dump("user", model.users);
  dump("item", model.items);
}

}  // namespace onebp
