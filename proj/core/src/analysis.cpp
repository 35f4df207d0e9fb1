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

#include <onebp/analysis.hpp>
#include <onebp/error.hpp>
#include <onebp/eval.hpp>
#include <onebp/format.hpp>

#include <algorithm>
#include <limits>
#include <ostream>
#include <random>
#include <string>

namespace onebp {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

class PointView {
 public:
  PointView(std::span<const double> values, std::size_t dim)
    : values_(values), dim_(dim) {}
  std::size_t size() const { return values_.size() / dim_; }
  std::span<const double> operator[](std::size_t i) const {
    return values_.subspan(i * dim_, dim_);
  }

 private:
  std::span<const double> values_;
  std::size_t dim_;
};

// k-means++: first centre uniform, then each next one with probability
// proportional to the squared distance to the nearest chosen centre.
std::vector<double> seed_centroids(const PointView& points,
                                   std::size_t dim,
                                   std::size_t k,
                                   std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<double> centroids;
  centroids.reserve(k * dim);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  const auto p0 = points[first(rng)];
  centroids.insert(centroids.end(), p0.begin(), p0.end());

  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = sq_dist(points[i], p0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (const double d : nearest) total += d;
    std::size_t chosen = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double running = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        running += nearest[i];
        if (running > target && nearest[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = first(rng);  // all points coincide with chosen centres
    }
    const auto p = points[chosen];
    centroids.insert(centroids.end(), p.begin(), p.end());
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sq_dist(points[i], p));
    }
  }
  return centroids;
}

}  // namespace

Clustering kmeans(std::span<const double> points,
                  std::size_t dim,
                  std::size_t k,
                  std::size_t max_iters,
                  std::uint64_t seed) {
  if (dim == 0 || points.size() % dim != 0) {
    throw Error("kmeans: point buffer is not a whole number of rows");
  }
  if (k == 0) throw Error("kmeans: k must be at least 1");
  const PointView view(points, dim);
  const std::size_t n = view.size();
  if (n < k) {
    throw Error("kmeans: " + std::to_string(n) + " points cannot form " +
                std::to_string(k) + " clusters");
  }

  std::mt19937_64 rng(seed);
  Clustering result;
  result.k = k;
  result.dim = dim;
  result.centroids = seed_centroids(view, dim, k, rng);
  result.assignments.assign(n, k);  // k marks "unassigned"

  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = sq_dist(view[i], result.centroid(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignments[i] != best) {
        result.assignments[i] = best;
        changed = true;
      }
      inertia += best_d;
    }
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;
    if (!changed) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = result.assignments[i];
      ++counts[c];
      const auto p = view[i];
      for (std::size_t t = 0; t < dim; ++t) sums[c * dim + t] += p[t];
    }
    std::vector<std::size_t> empty;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        empty.push_back(c);
        continue;
      }
      for (std::size_t t = 0; t < dim; ++t) {
        result.centroids[c * dim + t] = sums[c * dim + t] / static_cast<double>(counts[c]);
      }
    }
    if (empty.empty() || iter + 1 == max_iters) continue;

    // Re-seed each empty cluster at the point farthest from its centroid,
    // never picking the same point twice.
    std::vector<double> spread(n);
    for (std::size_t i = 0; i < n; ++i) {
      spread[i] = sq_dist(view[i], result.centroid(result.assignments[i]));
    }
    for (const std::size_t c : empty) {
      const auto far = static_cast<std::size_t>(
          std::max_element(spread.begin(), spread.end()) - spread.begin());
      const auto p = view[far];
      std::copy(p.begin(), p.end(), result.centroids.begin() + static_cast<std::ptrdiff_t>(c * dim));
      spread[far] = -1.0;
    }
  }

  result.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    result.inertia += sq_dist(view[i], result.centroid(result.assignments[i]));
  }
  return result;
}

std::vector<double> item_points(const EmbeddingModel& model) {
  const auto values = model.items.values();
  return std::vector<double>(values.begin(), values.end());
}

ClusterReport cluster_report(const Clustering& clustering,
                             const DataSplit& split,
                             const EmbeddingModel& model,
                             std::optional<UserIndex> user,
                             std::size_t k) {
  if (clustering.assignments.size() != model.num_items()) {
    throw Error("cluster_report: clustering does not cover every item");
  }
  if (k == 0) throw Error("cluster_report: list length must be positive");
  std::vector<UserIndex> users;
  if (user) {
    if (*user >= model.num_users()) {
      throw Error("cluster_report: user " + std::to_string(*user) + " out of range");
    }
    users.push_back(*user);
  } else {
    users = split.evaluable_users;
    if (users.empty()) throw Error("cluster_report: no evaluable users");
  }

  ClusterReport report;
  report.k = k;
  report.num_users = users.size();
  report.clusters.resize(clustering.k);
  for (const UserIndex u : users) {
    const auto test_items = split.test.items_of(u);
    for (const ItemIndex item : recommend_topk(model, split.train, u, k)) {
      auto& bucket = report.clusters[clustering.assignments[item]];
      ++bucket.recommended;
      if (std::binary_search(test_items.begin(), test_items.end(), item)) ++bucket.hits;
    }
    for (const ItemIndex item : test_items) {
      ++report.clusters[clustering.assignments[item]].test_items;
    }
  }
  const auto total = static_cast<double>(k * users.size());
  for (auto& c : report.clusters) {
    c.share = static_cast<double>(c.recommended) / total;
    if (c.recommended > 0) {
      c.precision = static_cast<double>(c.hits) / static_cast<double>(c.recommended);
    }
    if (c.test_items > 0) {
      c.recall = static_cast<double>(c.hits) / static_cast<double>(c.test_items);
    }
  }
  return report;
}

nlohmann::json to_json(const ClusterReport& report) {
  nlohmann::json j = nlohmann::json::object();
  const auto ratio = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  for (std::size_t c = 0; c < report.clusters.size(); ++c) {
    const auto& s = report.clusters[c];
    j[std::to_string(c)] = {
        {"share", s.share},
        {"precision", ratio(s.precision)},
        {"recall", ratio(s.recall)},
        {"recommended", s.recommended},
        {"hits", s.hits},
        {"test_items", s.test_items},
    };
  }
  return j;
}

void write_items_clustered_csv(std::ostream& out,
                               const Clustering& clustering,
                               const EmbeddingModel& model) {
  if (clustering.assignments.size() != model.num_items()) {
    throw Error("items_clustered: clustering does not cover every item");
  }
  out << "item,cluster";
  for (std::size_t t = 0; t < model.dim(); ++t) out << ",dim" << t;
  out << '\n';
  for (std::size_t j = 0; j < model.num_items(); ++j) {
    out << j << ',' << clustering.assignments[j];
    for (const float x : model.items.row(j)) out << ',' << format_real(x);
    out << '\n';
  }
}

}  // namespace onebp
