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
#include <onebp/model.hpp>

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace onebp {

struct Clustering {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<std::size_t> assignments;  // one per point
  std::vector<double> centroids;         // k x dim, row-major
  double inertia = 0.0;
  std::vector<double> inertia_history;   // after each assignment step
  std::size_t iterations = 0;

  std::span<const double> centroid(std::size_t c) const {
    return {centroids.data() + c * dim, dim};
  }
};

/// Lloyd's algorithm with k-means++ seeding. `points` is row-major
/// (points.size() / dim rows). Stops when assignments stop changing or after
/// max_iters assignment steps. A cluster left empty is re-seeded at the point
/// farthest from its current centroid.
///
/// Throws onebp::Error when there are fewer points than clusters.
Clustering kmeans(std::span<const double> points,
                  std::size_t dim,
                  std::size_t k,
                  std::size_t max_iters,
                  std::uint64_t seed);

/// Item embedding table widened to doubles, ready for kmeans().
std::vector<double> item_points(const EmbeddingModel& model);

struct ClusterStats {
  std::size_t recommended = 0;
  std::size_t hits = 0;
  std::size_t test_items = 0;
  double share = 0.0;
  std::optional<double> precision;  // empty when nothing was recommended
  std::optional<double> recall;     // empty when the cluster has no test item
};

struct ClusterReport {
  std::size_t k = 0;  // list length
  std::size_t num_users = 0;
  std::vector<ClusterStats> clusters;
};

/// Buckets top-K recommendations and test items by cluster. With a user,
/// reports on that user alone; otherwise counts are summed over all
/// evaluable users before ratios are taken.
ClusterReport cluster_report(const Clustering& clustering,
                             const DataSplit& split,
                             const EmbeddingModel& model,
                             std::optional<UserIndex> user,
                             std::size_t k);

/// Keyed by cluster index: {"share", "precision", "recall"}; null for
/// undefined ratios.
nlohmann::json to_json(const ClusterReport& report);

/// `item,cluster,dim0,...` rows for every item.
void write_items_clustered_csv(std::ostream& out,
                               const Clustering& clustering,
                               const EmbeddingModel& model);

}  // namespace onebp
