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
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace onebp {

/// Top-K unseen items for `user`: highest score first, ties by ascending
/// item index, items in the user's train adjacency excluded.
/// Throws onebp::Error if fewer than K candidates remain.
std::vector<ItemIndex> recommend_topk(const EmbeddingModel& model,
                                      const InteractionDataset& train,
                                      UserIndex user,
                                      std::size_t k);

struct EvalReport {
  std::vector<std::size_t> cutoffs;
  std::map<std::size_t, double> precision;
  std::map<std::size_t, double> recall;
  std::map<std::size_t, double> f1;
  std::map<std::size_t, double> ndcg;
  std::size_t num_users_evaluated = 0;
};

/// Macro-averaged P/R/F1/NDCG@K over split.evaluable_users. NDCG uses
/// binary relevance with the ideal DCG truncated at min(K, |test items|).
EvalReport evaluate(const EmbeddingModel& model,
                    const DataSplit& split,
                    std::span<const std::size_t> cutoffs,
                    std::size_t threads = 1);

nlohmann::json to_json(const EvalReport& report);

/// `metric,K,value` rows.
void write_report_csv(std::ostream& out, const EvalReport& report);

}  // namespace onebp
