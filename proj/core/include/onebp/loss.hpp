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

#include <onebp/model.hpp>
#include <onebp/sampler.hpp>

#include <span>
#include <vector>

namespace onebp {

/// InfoNCE loss of one (user, positive, negatives) sample with gradients
/// of that loss w.r.t. each embedding involved.
struct ContrastiveSampleGrad {
  double loss = 0.0;
  std::vector<double> grad_user;
  std::vector<double> grad_positive;
  std::vector<std::vector<double>> grad_negatives;
};

/// -log(exp(r_pos) / (exp(r_pos) + sum_k exp(r_negs[k]))), computed with a
/// max-shifted log-sum-exp. Throws onebp::Error if r_negs is empty.
double infonce_loss(double r_pos, std::span<const double> r_negs);

/// Softmax over {r_pos} + r_negs. probs[0] is the positive, probs[1 + k] the
/// k-th negative; probs.size() must be r_negs.size() + 1. Returns the loss.
double infonce_softmax(double r_pos,
                       std::span<const double> r_negs,
                       std::span<double> probs) noexcept;

/// With p the softmax over dot-product scores:
///   grad_positive  = -(1 - p_pos) u
///   grad_negatives = p_k u
///   grad_user      = -(1 - p_pos) v_pos + sum_k p_k v_k
/// Throws onebp::Error on dimension mismatch or empty negatives.
ContrastiveSampleGrad infonce_grads(
    std::span<const double> user,
    std::span<const double> positive,
    const std::vector<std::vector<double>>& negatives);

/// Convenience overload reading the rows named by `draw` from `model`.
ContrastiveSampleGrad infonce_grads(const EmbeddingModel& model,
                                    const NegativeDraw& draw);

}  // namespace onebp
