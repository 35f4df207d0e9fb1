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

#include <doctest.h>

#include <onebp/data.hpp>
#include <onebp/parallel.hpp>
#include <onebp/trainer.hpp>

#ifdef ONEBP_HAVE_CLI
#include <onebp_cli/commands.hpp>
#endif

#include "oracles.hpp"

#include <filesystem>
#include <fstream>
#include <random>

using namespace onebp;

namespace {

InteractionDataset load_ml100k() {
  REQUIRE_MESSAGE(testing::ml100k_available(), "MovieLens-100k not found at " << testing::ml100k_path());
  std::ifstream in(testing::ml100k_path());
  return parse_interactions(in, InteractionFormat::MovieLensTab);
}

}  // namespace

TEST_CASE("ml-100k shape") {
  const auto data = load_ml100k();
  CHECK(data.num_users() == 943);
  CHECK(data.num_items() == 1682);
  CHECK(data.size() == 100000);
  CHECK(std::abs(density(data) - 0.0630) <= 0.0001);

  const auto split = split_holdout(data, 0.2, 1);
  CHECK(split.train.size() + split.test.size() == 100000);
  CHECK(split.evaluable_users.size() == 943);
}

TEST_CASE("OneBP loss falls over the first epochs on ml-100k") {
  const auto split = split_holdout(load_ml100k(), 0.2, 1);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.strategy = Strategy::OneBP;
  cfg.learning_rate = default_learning_rate(Strategy::OneBP);
  auto model = init_model(943, 1682, cfg.dim, cfg.seed);
  const auto stats = train(model, split, cfg, {}, default_threads());
  REQUIRE(stats.size() == 5);
  for (std::size_t e = 1; e < stats.size(); ++e) {
    CHECK(stats[e].mean_loss < stats[e - 1].mean_loss);
  }
}

#ifdef ONEBP_HAVE_CLI
TEST_CASE("prepare reports the ml-100k shape") {
  REQUIRE(testing::ml100k_available());
  const auto dir = std::filesystem::temp_directory_path() /
                   ("onebp_ml100k_" + std::to_string(std::random_device{}()));
  cli::cmd_prepare({testing::ml100k_path(), InteractionFormat::MovieLensTab, 0.2, 1, dir});
  std::ifstream in(dir / "meta.json");
  const auto meta = nlohmann::json::parse(in);
  CHECK(meta["num_users"] == 943);
  CHECK(meta["num_items"] == 1682);
  CHECK(meta["num_interactions"] == 100000);
  in.close();
  std::filesystem::remove_all(dir);
}
#endif
