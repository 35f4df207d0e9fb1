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
#include <random>
#include <span>
#include <vector>

namespace onebp {

using Rng = std::mt19937_64;

struct NegativeDraw {
  UserIndex user;
  ItemIndex positive;
  std::vector<ItemIndex> negatives;
};

/// Draws `n` distinct items uniformly from the complement of the user's
/// adjacency in `train`. Uses rejection sampling when the complement has at
/// least 2n items, otherwise enumerates the complement and partially
/// shuffles it.
///
/// Throws onebp::Error when n == 0 or the complement holds fewer than n
/// items.
std::vector<ItemIndex> sample_negatives(const InteractionDataset& train,
                                        UserIndex user,
                                        std::size_t n,
                                        Rng& rng);

/// Same draw written into `out` (n = out.size()).
void sample_negatives_into(const InteractionDataset& train,
                           UserIndex user,
                           std::span<ItemIndex> out,
                           Rng& rng);

}  // namespace onebp
