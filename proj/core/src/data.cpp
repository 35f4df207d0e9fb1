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

#include <onebp/data.hpp>
#include <onebp/error.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace onebp {

InteractionDataset::InteractionDataset(std::size_t num_users,
                                       std::size_t num_items,
                                       std::vector<Interaction> interactions)
  : num_users_(num_users),
    num_items_(num_items),
    interactions_(std::move(interactions)) {
  std::vector<std::size_t> counts(num_users_ + 1, 0);
  for (const auto& [user, item] : interactions_) {
    if (user >= num_users_ || item >= num_items_) {
      throw Error("interaction (" + std::to_string(user) + ", " +
                  std::to_string(item) + ") outside " +
                  std::to_string(num_users_) + " x " +
                  std::to_string(num_items_));
    }
    ++counts[user + 1];
  }
  offsets_.assign(num_users_ + 1, 0);
  for (std::size_t u = 0; u < num_users_; ++u) {
    offsets_[u + 1] = offsets_[u] + counts[u + 1];
  }
  adjacency_.resize(interactions_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [user, item] : interactions_) {
    adjacency_[cursor[user]++] = item;
  }
  for (std::size_t u = 0; u < num_users_; ++u) {
    const auto first = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[u]);
    const auto last = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[u + 1]);
    std::sort(first, last);
    if (const auto dup = std::adjacent_find(first, last); dup != last) {
      throw Error("duplicate interaction (" + std::to_string(u) + ", " +
                  std::to_string(*dup) + ")");
    }
  }
}

std::span<const ItemIndex> InteractionDataset::items_of(UserIndex user) const {
  if (user >= num_users_) {
    throw Error("user index " + std::to_string(user) + " out of range");
  }
  return std::span<const ItemIndex>(adjacency_)
      .subspan(offsets_[user], offsets_[user + 1] - offsets_[user]);
}

bool InteractionDataset::contains(UserIndex user, ItemIndex item) const {
  const auto items = items_of(user);
  return std::binary_search(items.begin(), items.end(), item);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

bool is_integer(std::string_view s) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

template <typename Index>
Index parse_index(std::string_view s, std::size_t limit, std::size_t line) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("expected a non-negative index, got '" + std::string(s) + "'", line);
  }
  if (value >= limit) {
    throw ParseError("index " + std::string(s) + " out of range (limit " +
                         std::to_string(limit) + ")",
                     line);
  }
  return static_cast<Index>(value);
}

class IdRemapper {
 public:
  std::uint32_t operator()(std::string_view raw) {
    const auto [it, inserted] =
        ids_.try_emplace(std::string(raw), static_cast<std::uint32_t>(ids_.size()));
    return it->second;
  }
  std::size_t size() const { return ids_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
};

}  // namespace

InteractionDataset parse_interactions(std::istream& in,
                                      InteractionFormat format) {
  IdRemapper users;
  IdRemapper items;
  std::vector<Interaction> interactions;
  std::unordered_set<std::uint64_t> seen;

  const char sep = format == InteractionFormat::MovieLensTab ? '\t' : ',';
  const std::size_t expected = format == InteractionFormat::MovieLensTab ? 4 : 2;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, sep);
    if (fields.size() != expected) {
      throw ParseError("expected " + std::to_string(expected) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (fields[f].empty()) {
        throw ParseError("empty field " + std::to_string(f + 1), line_no);
      }
      if (format == InteractionFormat::MovieLensTab && !is_integer(fields[f])) {
        throw ParseError("field " + std::to_string(f + 1) +
                             " is not an integer: '" + std::string(fields[f]) + "'",
                         line_no);
      }
    }
    const UserIndex user = users(fields[0]);
    const ItemIndex item = items(fields[1]);
    if (!seen.insert((std::uint64_t{user} << 32) | item).second) continue;
    interactions.push_back({user, item});
  }
  if (in.bad()) throw Error("read error while parsing interactions");
  if (interactions.empty()) throw ParseError("input holds no interactions", 0);
  return InteractionDataset(users.size(), items.size(), std::move(interactions));
}

InteractionDataset read_indexed_pairs(std::istream& in,
                                      std::size_t num_users,
                                      std::size_t num_items) {
  std::vector<Interaction> interactions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, ',');
    if (fields.size() != 2) {
      throw ParseError("expected 2 fields, got " + std::to_string(fields.size()), line_no);
    }
    interactions.push_back({parse_index<UserIndex>(fields[0], num_users, line_no),
                            parse_index<ItemIndex>(fields[1], num_items, line_no)});
  }
  if (in.bad()) throw Error("read error while reading index pairs");
  return InteractionDataset(num_users, num_items, std::move(interactions));
}

void write_csv_pairs(std::ostream& out, const InteractionDataset& dataset) {
  for (const auto& [user, item] : dataset.interactions()) {
    out << user << ',' << item << '\n';
  }
}

double density(const InteractionDataset& dataset) {
  if (dataset.num_users() == 0 || dataset.num_items() == 0) {
    throw Error("density needs at least one user and one item");
  }
  return static_cast<double>(dataset.size()) /
         (static_cast<double>(dataset.num_users()) *
          static_cast<double>(dataset.num_items()));
}

DataSplit split_holdout(const InteractionDataset& dataset,
                        double test_fraction,
                        std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error("test_fraction must lie in (0, 1)");
  }
  if (dataset.empty()) throw Error("cannot split an empty dataset");

  std::mt19937_64 rng(seed);
  std::vector<std::vector<ItemIndex>> held_out(dataset.num_users());
  std::vector<ItemIndex> pool;
  for (UserIndex u = 0; u < dataset.num_users(); ++u) {
    const auto items = dataset.items_of(u);
    const std::size_t count = items.size();
    if (count < 2) continue;
    const auto wanted = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(count)));
    const std::size_t n_test = std::clamp<std::size_t>(wanted, 1, count - 1);
    pool.assign(items.begin(), items.end());
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(n_test);
    std::sort(pool.begin(), pool.end());
    held_out[u] = pool;
  }

  std::vector<Interaction> train;
  std::vector<Interaction> test;
  train.reserve(dataset.size());
  for (const auto& pair : dataset.interactions()) {
    const auto& mine = held_out[pair.user];
    if (std::binary_search(mine.begin(), mine.end(), pair.item)) {
      test.push_back(pair);
    } else {
      train.push_back(pair);
    }
  }
  return make_split(
      InteractionDataset(dataset.num_users(), dataset.num_items(), std::move(train)),
      InteractionDataset(dataset.num_users(), dataset.num_items(), std::move(test)));
}

DataSplit make_split(InteractionDataset train, InteractionDataset test) {
  if (train.num_users() != test.num_users() || train.num_items() != test.num_items()) {
    throw Error("train and test shapes differ");
  }
  DataSplit split{std::move(train), std::move(test), {}};
  for (UserIndex u = 0; u < split.test.num_users(); ++u) {
    if (!split.test.items_of(u).empty() && !split.train.items_of(u).empty()) {
      split.evaluable_users.push_back(u);
    }
  }
  return split;
}

}  // namespace onebp
