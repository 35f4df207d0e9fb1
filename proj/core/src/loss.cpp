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

#include <onebp/loss.hpp>
#include <onebp/error.hpp>

#include <algorithm>
#include <cmath>

namespace onebp {

double infonce_softmax(double r_pos,
                       std::span<const double> r_negs,
                       std::span<double> probs) noexcept {
  double shift = r_pos;
  for (const double r : r_negs) shift = std::max(shift, r);
  probs[0] = std::exp(r_pos - shift);
  double total = probs[0];
  for (std::size_t k = 0; k < r_negs.size(); ++k) {
    probs[k + 1] = std::exp(r_negs[k] - shift);
    total += probs[k + 1];
  }
  for (auto& p : probs) p /= total;
  // -log softmax_pos = log(total) - (r_pos - shift); never negative.
  return std::max(0.0, std::log(total) - (r_pos - shift));
}

double infonce_loss(double r_pos, std::span<const double> r_negs) {
  if (r_negs.empty()) throw Error("infonce_loss: no negatives");
  std::vector<double> probs(r_negs.size() + 1);
  return infonce_softmax(r_pos, r_negs, probs);
}

ContrastiveSampleGrad infonce_grads(
    std::span<const double> user,
    std::span<const double> positive,
    const std::vector<std::vector<double>>& negatives) {
  if (negatives.empty()) throw Error("infonce_grads: no negatives");
  const std::size_t d = user.size();
  if (positive.size() != d) throw Error("infonce_grads: positive dimension mismatch");
  for (const auto& v : negatives) {
    if (v.size() != d) throw Error("infonce_grads: negative dimension mismatch");
  }

  const auto dot = [d](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
  };
  std::vector<double> r_negs(negatives.size());
  for (std::size_t k = 0; k < negatives.size(); ++k) r_negs[k] = dot(user, negatives[k]);
  std::vector<double> probs(negatives.size() + 1);

  ContrastiveSampleGrad g;
  g.loss = infonce_softmax(dot(user, positive), r_negs, probs);
  const double pull = -(1.0 - probs[0]);
  g.grad_user.assign(d, 0.0);
  g.grad_positive.assign(d, 0.0);
  g.grad_negatives.assign(negatives.size(), std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    g.grad_positive[i] = pull * user[i];
    g.grad_user[i] = pull * positive[i];
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const double p = probs[k + 1];
    for (std::size_t i = 0; i < d; ++i) {
      g.grad_negatives[k][i] = p * user[i];
      g.grad_user[i] += p * negatives[k][i];
    }
  }
  return g;
}

ContrastiveSampleGrad infonce_grads(const EmbeddingModel& model,
                                    const NegativeDraw& draw) {
  const auto widen = [](std::span<const float> row) {
    return std::vector<double>(row.begin(), row.end());
  };
  if (draw.user >= model.num_users() || draw.positive >= model.num_items()) {
    throw Error("infonce_grads: draw index out of range");
  }
  std::vector<std::vector<double>> negatives;
  negatives.reserve(draw.negatives.size());
  for (const ItemIndex k : draw.negatives) {
    if (k >= model.num_items()) throw Error("infonce_grads: negative index out of range");
    negatives.push_back(widen(model.items.row(k)));
  }
  return infonce_grads(widen(model.users.row(draw.user)),
                       widen(model.items.row(draw.positive)), negatives);
}

}  // namespace onebp
