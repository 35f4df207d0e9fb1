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

#include <onebp/eval.hpp>
#include <onebp/error.hpp>
#include <onebp/format.hpp>
#include <onebp/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace onebp {

namespace {

// Fills `out` with the top-k unseen items given precomputed scores.
void topk_from_scores(std::span<const double> scores,
                      std::span<const ItemIndex> seen,
                      std::size_t k,
                      std::vector<ItemIndex>& candidates,
                      std::vector<ItemIndex>& out) {
  candidates.clear();
  auto next_seen = seen.begin();
  for (ItemIndex j = 0; j < scores.size(); ++j) {
    if (next_seen != seen.end() && *next_seen == j) {
      ++next_seen;
      continue;
    }
    candidates.push_back(j);
  }
  if (candidates.size() < k) {
    throw Error("only " + std::to_string(candidates.size()) +
                " candidate items for a top-" + std::to_string(k) + " list");
  }
  const auto better = [scores](ItemIndex a, ItemIndex b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  const auto mid = candidates.begin() + static_cast<std::ptrdiff_t>(k);
  std::partial_sort(candidates.begin(), mid, candidates.end(), better);
  out.assign(candidates.begin(), mid);
}

struct UserMetrics {
  std::vector<double> precision, recall, f1, ndcg;
};

}  // namespace

std::vector<ItemIndex> recommend_topk(const EmbeddingModel& model,
                                      const InteractionDataset& train,
                                      UserIndex user,
                                      std::size_t k) {
  if (model.num_items() != train.num_items() || user >= model.num_users()) {
    throw Error("recommend_topk: user or shape out of range");
  }
  const auto scores = score_all_items(model, user);
  std::vector<ItemIndex> candidates;
  std::vector<ItemIndex> out;
  topk_from_scores(scores, train.items_of(user), k, candidates, out);
  return out;
}

EvalReport evaluate(const EmbeddingModel& model,
                    const DataSplit& split,
                    std::span<const std::size_t> cutoffs,
                    std::size_t threads) {
  if (split.evaluable_users.empty()) throw Error("evaluate: no evaluable users");
  if (cutoffs.empty()) throw Error("evaluate: no cutoffs given");
  if (model.num_users() != split.train.num_users() ||
      model.num_items() != split.train.num_items()) {
    throw Error("evaluate: model shape does not match the split");
  }
  for (const std::size_t k : cutoffs) {
    if (k == 0) throw Error("evaluate: cutoffs must be positive");
  }
  const std::size_t max_k = *std::max_element(cutoffs.begin(), cutoffs.end());
  const std::size_t n_users = split.evaluable_users.size();
  const std::size_t n_cut = cutoffs.size();

  std::vector<double> precision(n_users * n_cut), recall(n_users * n_cut),
      f1(n_users * n_cut), ndcg(n_users * n_cut);
  std::vector<std::string> failures(n_users);

  parallel_for(n_users, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> scores(model.num_items());
    std::vector<ItemIndex> candidates;
    std::vector<ItemIndex> top;
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const UserIndex user = split.evaluable_users[idx];
      score_all_items_into(model, user, scores);
      try {
        topk_from_scores(scores, split.train.items_of(user), max_k, candidates, top);
      } catch (const Error& e) {
        failures[idx] = "user " + std::to_string(user) + ": " + e.what();
        continue;
      }
      const auto test_items = split.test.items_of(user);
      const auto n_test = static_cast<double>(test_items.size());
      for (std::size_t c = 0; c < n_cut; ++c) {
        const std::size_t k = cutoffs[c];
        std::size_t hits = 0;
        double dcg = 0.0;
        for (std::size_t r = 0; r < k; ++r) {
          if (std::binary_search(test_items.begin(), test_items.end(), top[r])) {
            ++hits;
            dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
          }
        }
        double idcg = 0.0;
        for (std::size_t i = 0; i < std::min(k, test_items.size()); ++i) {
          idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
        }
        const double p = static_cast<double>(hits) / static_cast<double>(k);
        const double r = static_cast<double>(hits) / n_test;
        const std::size_t at = idx * n_cut + c;
        precision[at] = p;
        recall[at] = r;
        f1[at] = (p + r == 0.0) ? 0.0 : 2.0 * p * r / (p + r);
        ndcg[at] = dcg / idcg;
      }
    }
  });
  for (const auto& f : failures) {
    if (!f.empty()) throw Error("evaluate: " + f);
  }

  EvalReport report;
  report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  report.num_users_evaluated = n_users;
  for (std::size_t c = 0; c < n_cut; ++c) {
    double sp = 0.0, sr = 0.0, sf = 0.0, sn = 0.0;
    for (std::size_t idx = 0; idx < n_users; ++idx) {
      const std::size_t at = idx * n_cut + c;
      sp += precision[at];
      sr += recall[at];
      sf += f1[at];
      sn += ndcg[at];
    }
    const auto n = static_cast<double>(n_users);
    const std::size_t k = cutoffs[c];
    report.precision[k] = sp / n;
    report.recall[k] = sr / n;
    report.f1[k] = sf / n;
    report.ndcg[k] = sn / n;
  }
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["cutoffs"] = report.cutoffs;
  j["num_users_evaluated"] = report.num_users_evaluated;
  const auto table = [](const std::map<std::size_t, double>& m) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [k, v] : m) t[std::to_string(k)] = v;
    return t;
  };
  j["precision"] = table(report.precision);
  j["recall"] = table(report.recall);
  j["f1"] = table(report.f1);
  j["ndcg"] = table(report.ndcg);
  return j;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "metric,K,value\n";
  const std::pair<const char*, const std::map<std::size_t, double>*> metrics[] = {
      {"precision", &report.precision},
      {"recall", &report.recall},
      {"f1", &report.f1},
      {"ndcg", &report.ndcg},
  };
  for (const auto& [name, values] : metrics) {
    for (const std::size_t k : report.cutoffs) {
      out << name << ',' << k << ',' << format_real(values->at(k)) << '\n';
    }
  }
}

}  // namespace onebp
