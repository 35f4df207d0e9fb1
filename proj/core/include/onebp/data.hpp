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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace onebp {

using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;

struct Interaction {
  UserIndex user;
  ItemIndex item;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

/// Binary user-item interactions over dense index spaces [0, M) x [0, N).
///
/// Interactions keep the order they were supplied in; per-user adjacency is
/// stored as a sorted CSR index for O(log n) membership checks. Immutable
/// after construction.
class InteractionDataset {
 public:
  InteractionDataset() = default;

  /// Throws onebp::Error on out-of-range indices or duplicate pairs.
  InteractionDataset(std::size_t num_users,
                     std::size_t num_items,
                     std::vector<Interaction> interactions);

  std::size_t num_users() const noexcept { return num_users_; }
  std::size_t num_items() const noexcept { return num_items_; }
  std::size_t size() const noexcept { return interactions_.size(); }
  bool empty() const noexcept { return interactions_.empty(); }

  std::span<const Interaction> interactions() const noexcept {
    return interactions_;
  }

  /// Sorted item indices the user interacted with.
  std::span<const ItemIndex> items_of(UserIndex user) const;

  bool contains(UserIndex user, ItemIndex item) const;

  friend bool operator==(const InteractionDataset& a,
                         const InteractionDataset& b) {
    return a.num_users_ == b.num_users_ && a.num_items_ == b.num_items_ &&
           a.interactions_ == b.interactions_;
  }

 private:
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  std::vector<Interaction> interactions_;
  std::vector<std::size_t> offsets_{0};
  std::vector<ItemIndex> adjacency_;
};

enum class InteractionFormat {
  MovieLensTab,  // user<TAB>item<TAB>rating<TAB>timestamp
  CsvPairs,      // user,item
};

/// Parses a raw interaction log. Raw identifiers are remapped to dense
/// indices in first-appearance order, every row counts as an interaction
/// regardless of rating, and repeated pairs collapse to one.
///
/// Throws ParseError (with 1-based line number) on malformed rows or when
/// the input holds no rows.
InteractionDataset parse_interactions(std::istream& in,
                                      InteractionFormat format);

/// Reads `user,item` rows that already hold dense indices (split files).
/// No remapping; indices are checked against the given shape.
InteractionDataset read_indexed_pairs(std::istream& in,
                                      std::size_t num_users,
                                      std::size_t num_items);

/// Writes interactions as `user,item` rows in dataset order.
void write_csv_pairs(std::ostream& out, const InteractionDataset& dataset);

/// |interactions| / (M * N).
double density(const InteractionDataset& dataset);

struct DataSplit {
  InteractionDataset train;
  InteractionDataset test;
  std::vector<UserIndex> evaluable_users;  // ascending
};

/// Per-user random holdout. A user with c >= 2 interactions sends
/// clamp(round(test_fraction * c), 1, c - 1) of them to test; users with
/// fewer than two interactions stay entirely in train and are not
/// evaluable. Deterministic for a fixed seed.
DataSplit split_holdout(const InteractionDataset& dataset,
                        double test_fraction,
                        std::uint64_t seed);

/// Rebuilds the evaluable-user list from a train/test pair: users with at
/// least one interaction on each side.
DataSplit make_split(InteractionDataset train, InteractionDataset test);

}  // namespace onebp
