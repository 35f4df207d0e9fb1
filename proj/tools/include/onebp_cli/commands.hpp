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

#include <onebp/eval.hpp>
#include <onebp/trainer.hpp>

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace onebp::cli {

namespace fs = std::filesystem;

// Flag values that take precedence over the config file.
struct ConfigOverrides {
  std::optional<std::size_t> dim;
  std::optional<double> learning_rate;
  std::optional<double> beta;
  std::optional<std::size_t> num_negatives;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> epochs;
  std::optional<std::uint64_t> seed;
  std::optional<Strategy> strategy;
};

/// Field names accepted in a config file.
const std::vector<std::string>& config_keys();

/// Defaults, then flat JSON keys from `file`, then `flags`. When neither
/// source sets learning_rate, the strategy's tuned default is used.
/// Throws onebp::Error on unknown keys (listing the accepted ones) or
/// ill-typed values.
TrainConfig resolve_config(const nlohmann::json& file, const ConfigOverrides& flags);

nlohmann::json to_json(const TrainConfig& config);

/// "5,10,20" -> {5, 10, 20}. Throws onebp::Error on malformed lists.
std::vector<std::size_t> parse_cutoffs(std::string_view text);
std::vector<double> parse_values(std::string_view text);

struct PreparedData {
  DataSplit split;
  std::uint64_t fingerprint = 0;  // FNV-1a over train.csv then test.csv bytes
};

/// Reads train.csv, test.csv and meta.json from a `prepare` output dir.
PreparedData load_prepared(const fs::path& dir);

struct PrepareArgs {
  fs::path input;
  InteractionFormat format = InteractionFormat::MovieLensTab;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  fs::path out;
};
void cmd_prepare(const PrepareArgs& args);

struct TrainArgs {
  fs::path data;
  std::optional<fs::path> config;
  ConfigOverrides overrides;
  std::vector<std::size_t> cutoffs{5, 10, 20};
  fs::path out;
};
/// Writes model.bin, model.json, epochs.csv and manifest.json into out.
void cmd_train(const TrainArgs& args);

struct EvaluateArgs {
  fs::path checkpoint;
  fs::path data;
  std::vector<std::size_t> cutoffs{5, 10, 20};
  fs::path out;
};
/// Writes report.json and report.csv into out.
EvalReport cmd_evaluate(const EvaluateArgs& args);

enum class SweepAxis { Beta, NumNegatives };
SweepAxis parse_axis(std::string_view name);

struct SweepArgs {
  fs::path data;
  std::optional<fs::path> config;
  ConfigOverrides overrides;
  SweepAxis axis = SweepAxis::Beta;
  std::vector<double> values;
  std::vector<std::size_t> cutoffs{5, 10, 20};
  fs::path out;
};
/// Writes sweep.csv (`axis_value,metric,K,value`) into out.
void cmd_sweep(const SweepArgs& args);

struct ClusterArgs {
  fs::path checkpoint;
  fs::path data;
  std::size_t clusters = 6;
  std::optional<UserIndex> user;
  std::size_t k = 10;
  std::size_t max_iters = 300;
  std::uint64_t seed = 1;
  fs::path out;
};
/// Writes items_clustered.csv and cluster_report.json into out.
void cmd_cluster(const ClusterArgs& args);

/// Writes embeddings.csv into out.
void cmd_export_embeddings(const fs::path& checkpoint, const fs::path& out);

/// Parses argv and dispatches. Returns the process exit code; diagnostics
/// go to stderr.
int run(int argc, const char* const* argv);

}  // namespace onebp::cli
