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

#include <onebp/sampler.hpp>
#include <onebp/error.hpp>

#include <algorithm>
#include <string>

namespace onebp {

void sample_negatives_into(const InteractionDataset& train,
                           UserIndex user,
                           std::span<ItemIndex> out,
                           Rng& rng) {
  const std::size_t n = out.size();
  if (n == 0) throw Error("sample_negatives: n must be at least 1");
  const auto seen = train.items_of(user);
  const std::size_t pool = train.num_items() - seen.size();
  if (pool < n) {
    throw Error("sample_negatives: user " + std::to_string(user) + " has " +
                std::to_string(pool) + " uninteracted items, " +
                std::to_string(n) + " requested");
  }

  if (pool < 2 * n) {
    std::vector<ItemIndex> complement;
    complement.reserve(pool);
    auto next_seen = seen.begin();
    for (ItemIndex j = 0; j < train.num_items(); ++j) {
      if (next_seen != seen.end() && *next_seen == j) {
        ++next_seen;
        continue;
      }
      complement.push_back(j);
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, complement.size() - 1);
      std::swap(complement[i], complement[pick(rng)]);
      out[i] = complement[i];
    }
    return;
  }

  std::uniform_int_distribution<ItemIndex> pick(
      0, static_cast<ItemIndex>(train.num_items() - 1));
  for (std::size_t i = 0; i < n;) {
    const ItemIndex j = pick(rng);
    if (std::binary_search(seen.begin(), seen.end(), j)) continue;
    if (std::find(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(i), j) !=
        out.begin() + static_cast<std::ptrdiff_t>(i)) {
      continue;
    }
    out[i++] = j;
  }
}

std::vector<ItemIndex> sample_negatives(const InteractionDataset& train,
                                        UserIndex user,
                                        std::size_t n,
                                        Rng& rng) {
  std::vector<ItemIndex> out(n);
  sample_negatives_into(train, user, out, rng);
  return out;
}

}  // namespace onebp
