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

#include <onebp/trainer.hpp>
#include <onebp/error.hpp>
#include <onebp/parallel.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <string>

namespace onebp {

std::string_view to_string(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::TwoBP: return "twobp";
    case Strategy::OneBP: return "onebp";
    case Strategy::UserOnlyBP: return "useronlybp";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto s : {Strategy::TwoBP, Strategy::OneBP, Strategy::UserOnlyBP}) {
    if (lower == to_string(s)) return s;
  }
  throw Error("unknown strategy '" + std::string(name) +
              "' (expected twobp, onebp or useronlybp)");
}

double default_learning_rate(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::TwoBP: return 0.002;
    case Strategy::OneBP: return 0.02;
    case Strategy::UserOnlyBP: return 0.05;
  }
  return 0.02;
}

void TrainConfig::validate() const {
  if (dim == 0) throw Error("dim must be positive");
  if (!(learning_rate >= 0.0)) throw Error("learning_rate must be non-negative");
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("beta must lie in [0, 1]");
  if (num_negatives == 0) throw Error("num_negatives must be at least 1");
  if (batch_size == 0) throw Error("batch_size must be at least 1");
}

namespace {

void step(std::span<float> row, std::span<const double> grad, double lr) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    row[i] = static_cast<float>(static_cast<double>(row[i]) - lr * grad[i]);
  }
}

// row <- beta * row + (1 - beta) * target
void aggregate(std::span<float> row, std::span<const float> target, double beta) {
  const double keep = beta;
  const double take = 1.0 - beta;
  for (std::size_t i = 0; i < row.size(); ++i) {
    row[i] = static_cast<float>(keep * static_cast<double>(row[i]) +
                                take * static_cast<double>(target[i]));
  }
}

void require_finite(std::span<const float> row, std::size_t epoch, std::size_t batch) {
  if (!all_finite(row)) throw DivergenceError(epoch, batch);
}

void check_draw(const EmbeddingModel& model,
                const NegativeDraw& draw,
                const ContrastiveSampleGrad& grads) {
  if (draw.user >= model.num_users() || draw.positive >= model.num_items()) {
    throw Error("draw index out of range");
  }
  for (const ItemIndex k : draw.negatives) {
    if (k >= model.num_items()) throw Error("negative index out of range");
  }
  if (grads.grad_negatives.size() != draw.negatives.size()) {
    throw Error("gradient count does not match negatives");
  }
}

void step_items(EmbeddingModel& model,
                const NegativeDraw& draw,
                const ContrastiveSampleGrad& grads,
                double lr) {
  step(model.items.row(draw.positive), grads.grad_positive, lr);
  for (std::size_t k = 0; k < draw.negatives.size(); ++k) {
    step(model.items.row(draw.negatives[k]), grads.grad_negatives[k], lr);
  }
  require_finite(model.items.row(draw.positive), 0, 0);
  for (const ItemIndex k : draw.negatives) require_finite(model.items.row(k), 0, 0);
}

}  // namespace

void apply_twobp(EmbeddingModel& model,
                 const NegativeDraw& draw,
                 const ContrastiveSampleGrad& grads,
                 double learning_rate) {
  check_draw(model, draw, grads);
  step(model.users.row(draw.user), grads.grad_user, learning_rate);
  step_items(model, draw, grads, learning_rate);
  require_finite(model.users.row(draw.user), 0, 0);
}

void apply_onebp(EmbeddingModel& model,
                 const NegativeDraw& draw,
                 const ContrastiveSampleGrad& grads,
                 double learning_rate,
                 double beta) {
  check_draw(model, draw, grads);
  step_items(model, draw, grads, learning_rate);
  aggregate(model.users.row(draw.user), model.items.row(draw.positive), beta);
  require_finite(model.users.row(draw.user), 0, 0);
}

void apply_useronlybp(EmbeddingModel& model,
                      const NegativeDraw& draw,
                      const ContrastiveSampleGrad& grads,
                      double learning_rate,
                      double beta) {
  check_draw(model, draw, grads);
  step(model.users.row(draw.user), grads.grad_user, learning_rate);
  require_finite(model.users.row(draw.user), 0, 0);
  aggregate(model.items.row(draw.positive), model.users.row(draw.user), beta);
  require_finite(model.items.row(draw.positive), 0, 0);
}

EpochRngs EpochRngs::derive(std::uint64_t seed, std::size_t epoch) {
  const auto lo = static_cast<std::uint32_t>(seed);
  const auto hi = static_cast<std::uint32_t>(seed >> 32);
  const auto ep = static_cast<std::uint32_t>(epoch);
  std::seed_seq shuffle_seq{lo, hi, ep, 1u};
  std::seed_seq negative_seq{lo, hi, ep, 2u};
  return EpochRngs{Rng(shuffle_seq), Rng(negative_seq)};
}

namespace {

// Dense per-row gradient sums with a first-touch list, so draining visits
// rows in a deterministic order and only rows touched in this batch.
class GradAccumulator {
 public:
  GradAccumulator(std::size_t rows, std::size_t dim)
    : dim_(dim), sums_(rows * dim, 0.0), touched_flag_(rows, 0) {}

  std::span<double> slot(std::size_t row) {
    if (!touched_flag_[row]) {
      touched_flag_[row] = 1;
      touched_.push_back(row);
    }
    return {sums_.data() + row * dim_, dim_};
  }

  template <typename Fn>
  void drain(Fn&& fn) {
    for (const std::size_t row : touched_) {
      std::span<double> sum(sums_.data() + row * dim_, dim_);
      fn(row, std::span<const double>(sum));
      std::fill(sum.begin(), sum.end(), 0.0);
      touched_flag_[row] = 0;
    }
    touched_.clear();
  }

 private:
  std::size_t dim_;
  std::vector<double> sums_;
  std::vector<std::uint8_t> touched_flag_;
  std::vector<std::size_t> touched_;
};

void axpy(std::span<double> acc, double a, std::span<const float> x) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a * static_cast<double>(x[i]);
}

}  // namespace

EpochStats train_epoch(EmbeddingModel& model,
                       const InteractionDataset& train,
                       const TrainConfig& config,
                       std::size_t epoch,
                       EpochRngs& rngs,
                       std::size_t threads) {
  config.validate();
  if (model.num_users() != train.num_users() || model.num_items() != train.num_items()) {
    throw Error("model shape does not match the training data");
  }
  const auto start = std::chrono::steady_clock::now();

  const std::size_t dim = model.dim();
  const std::size_t ns = config.num_negatives;
  const std::size_t width = ns + 1;
  const double lr = config.learning_rate;
  const double beta = config.beta;
  const bool items_by_gradient = config.strategy != Strategy::UserOnlyBP;
  const bool users_by_gradient = config.strategy != Strategy::OneBP;

  std::vector<Interaction> pairs(train.interactions().begin(), train.interactions().end());
  std::shuffle(pairs.begin(), pairs.end(), rngs.shuffle);

  GradAccumulator item_grads(items_by_gradient ? model.num_items() : 0, dim);
  GradAccumulator user_grads(users_by_gradient ? model.num_users() : 0, dim);

  const std::size_t batch_cap = std::min(config.batch_size, std::max<std::size_t>(pairs.size(), 1));
  std::vector<ItemIndex> negatives(batch_cap * ns);
  std::vector<double> probs(batch_cap * width);
  std::vector<double> losses(batch_cap);

  double loss_sum = 0.0;
  std::size_t batch_index = 0;
  for (std::size_t begin = 0; begin < pairs.size(); begin += config.batch_size, ++batch_index) {
    const std::size_t end = std::min(pairs.size(), begin + config.batch_size);
    const std::size_t count = end - begin;
    const std::span<const Interaction> batch(pairs.data() + begin, count);

    for (std::size_t s = 0; s < count; ++s) {
      sample_negatives_into(train, batch[s].user,
                            std::span<ItemIndex>(negatives.data() + s * ns, ns),
                            rngs.negatives);
    }

    parallel_for(count, threads, [&](std::size_t lo, std::size_t hi) {
      std::vector<double> scores(ns);
      for (std::size_t s = lo; s < hi; ++s) {
        const auto u = model.users.row(batch[s].user);
        const double r_pos = dot(u, model.items.row(batch[s].item));
        for (std::size_t k = 0; k < ns; ++k) {
          scores[k] = dot(u, model.items.row(negatives[s * ns + k]));
        }
        losses[s] = infonce_softmax(r_pos, scores,
                                    std::span<double>(probs.data() + s * width, width));
      }
    });

    for (std::size_t s = 0; s < count; ++s) {
      loss_sum += losses[s];
      const auto [user, positive] = batch[s];
      const double* p = probs.data() + s * width;
      const double pull = -(1.0 - p[0]);
      if (items_by_gradient) {
        const auto u = model.users.row(user);
        axpy(item_grads.slot(positive), pull, u);
        for (std::size_t k = 0; k < ns; ++k) {
          axpy(item_grads.slot(negatives[s * ns + k]), p[k + 1], u);
        }
      }
      if (users_by_gradient) {
        auto acc = user_grads.slot(user);
        axpy(acc, pull, model.items.row(positive));
        for (std::size_t k = 0; k < ns; ++k) {
          axpy(acc, p[k + 1], model.items.row(negatives[s * ns + k]));
        }
      }
    }

    item_grads.drain([&](std::size_t row, std::span<const double> g) {
      step(model.items.row(row), g, lr);
      require_finite(model.items.row(row), epoch, batch_index);
    });
    user_grads.drain([&](std::size_t row, std::span<const double> g) {
      step(model.users.row(row), g, lr);
      require_finite(model.users.row(row), epoch, batch_index);
    });

    if (config.strategy == Strategy::OneBP) {
      for (const auto& [user, positive] : batch) {
        aggregate(model.users.row(user), model.items.row(positive), beta);
        require_finite(model.users.row(user), epoch, batch_index);
      }
    } else if (config.strategy == Strategy::UserOnlyBP) {
      for (const auto& [user, positive] : batch) {
        aggregate(model.items.row(positive), model.users.row(user), beta);
        require_finite(model.items.row(positive), epoch, batch_index);
      }
    }
  }

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return EpochStats{epoch,
                    pairs.empty() ? 0.0 : loss_sum / static_cast<double>(pairs.size()),
                    elapsed.count()};
}

std::vector<EpochStats> train(EmbeddingModel& model,
                              const DataSplit& split,
                              const TrainConfig& config,
                              const EpochHook& hook,
                              std::size_t threads) {
  config.validate();
  std::vector<EpochStats> stats;
  stats.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    auto rngs = EpochRngs::derive(config.seed, epoch);
    stats.push_back(train_epoch(model, split.train, config, epoch, rngs, threads));
    if (hook) hook(stats.back(), model);
  }
  return stats;
}

}  // namespace onebp
