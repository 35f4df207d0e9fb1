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

#pragma once

#include <onebp/data.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace onebp {

/// Row-major rows x dim table of 32-bit reals.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim)
    : rows_(rows), dim_(dim), values_(rows * dim, 0.0f) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<float> row(std::size_t i) noexcept {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<const float> row(std::size_t i) const noexcept {
    return {values_.data() + i * dim_, dim_};
  }

  std::span<float> values() noexcept { return values_; }
  std::span<const float> values() const noexcept { return values_; }

  friend bool operator==(const EmbeddingMatrix&,
                         const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> values_;
};

/// The two towers: one projection row per user and per item.
struct EmbeddingModel {
  EmbeddingMatrix users;
  EmbeddingMatrix items;

  std::size_t num_users() const noexcept { return users.rows(); }
  std::size_t num_items() const noexcept { return items.rows(); }
  std::size_t dim() const noexcept { return users.dim(); }

  friend bool operator==(const EmbeddingModel&,
                         const EmbeddingModel&) = default;
};

/// Every entry i.i.d. N(0, 0.1^2) from a generator seeded with `seed`.
EmbeddingModel init_model(std::size_t num_users,
                          std::size_t num_items,
                          std::size_t dim,
                          std::uint64_t seed);

/// Dot product with 64-bit accumulation.
double dot(std::span<const float> a, std::span<const float> b) noexcept;

/// Throws onebp::Error for out-of-range indices.
double score(const EmbeddingModel& model, UserIndex user, ItemIndex item);

std::vector<double> score_all_items(const EmbeddingModel& model,
                                    UserIndex user);

/// Unchecked variant writing into a caller buffer of size num_items().
void score_all_items_into(const EmbeddingModel& model,
                          UserIndex user,
                          std::span<double> out) noexcept;

bool all_finite(std::span<const float> values) noexcept;

// Binary dump: "OBP1", then M, N, d as little-endian u64, then the user and
// item matrices row-major as little-endian f32.
void save_binary(std::ostream& out, const EmbeddingModel& model);
EmbeddingModel load_binary(std::istream& in);

/// CSV with header `entity,index,dim0,...`; user rows first, then items.
void write_embeddings_csv(std::ostream& out, const EmbeddingModel& model);

}  // namespace onebp
