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

#include <onebp_cli/commands.hpp>

#include <onebp/analysis.hpp>
#include <onebp/data.hpp>
#include <onebp/error.hpp>
#include <onebp/format.hpp>
#include <onebp/model.hpp>
#include <onebp/parallel.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace onebp::cli {

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

EmbeddingModel load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  return load_binary(in);
}

void save_checkpoint(const fs::path& path, const EmbeddingModel& model) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  save_binary(out, model);
}

std::string list_keys() {
  std::string s;
  for (const auto& k : config_keys()) s += (s.empty() ? "" : ", ") + k;
  return s;
}

template <typename T>
T config_value(const nlohmann::json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw Error("");
      return v.get<double>();
    } else {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw Error("");
      }
      return v.get<T>();
    }
  } catch (const std::exception&) {
    throw Error("config key '" + key + "' has an invalid value " + v.dump());
  }
}

void check_shape(const EmbeddingModel& model, const DataSplit& split) {
  if (model.num_users() != split.train.num_users() ||
      model.num_items() != split.train.num_items()) {
    throw Error("checkpoint shape " + std::to_string(model.num_users()) + " x " +
                std::to_string(model.num_items()) + " does not match dataset " +
                std::to_string(split.train.num_users()) + " x " +
                std::to_string(split.train.num_items()));
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "dim", "learning_rate", "beta", "num_negatives",
      "batch_size", "epochs", "seed", "strategy"};
  return keys;
}

TrainConfig resolve_config(const nlohmann::json& file, const ConfigOverrides& flags) {
  TrainConfig cfg;
  bool lr_set = false;
  if (!file.is_null()) {
    if (!file.is_object()) throw Error("config must be a flat JSON object");
    for (const auto& [key, value] : file.items()) {
      if (key == "dim") cfg.dim = config_value<std::size_t>(value, key);
      else if (key == "learning_rate") { cfg.learning_rate = config_value<double>(value, key); lr_set = true; }
      else if (key == "beta") cfg.beta = config_value<double>(value, key);
      else if (key == "num_negatives") cfg.num_negatives = config_value<std::size_t>(value, key);
      else if (key == "batch_size") cfg.batch_size = config_value<std::size_t>(value, key);
      else if (key == "epochs") cfg.epochs = config_value<std::size_t>(value, key);
      else if (key == "seed") cfg.seed = config_value<std::uint64_t>(value, key);
      else if (key == "strategy") {
        if (!value.is_string()) throw Error("config key 'strategy' must be a string");
        cfg.strategy = parse_strategy(value.get<std::string>());
      } else {
        throw Error("unknown config key '" + key + "'; accepted keys: " + list_keys());
      }
    }
  }
  if (flags.dim) cfg.dim = *flags.dim;
  if (flags.learning_rate) { cfg.learning_rate = *flags.learning_rate; lr_set = true; }
  if (flags.beta) cfg.beta = *flags.beta;
  if (flags.num_negatives) cfg.num_negatives = *flags.num_negatives;
  if (flags.batch_size) cfg.batch_size = *flags.batch_size;
  if (flags.epochs) cfg.epochs = *flags.epochs;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.strategy) cfg.strategy = *flags.strategy;
  if (!lr_set) cfg.learning_rate = default_learning_rate(cfg.strategy);
  cfg.validate();
  if (!(cfg.learning_rate > 0.0)) throw Error("learning_rate must be positive");
  return cfg;
}

nlohmann::json to_json(const TrainConfig& c) {
  return {
      {"dim", c.dim},
      {"learning_rate", c.learning_rate},
      {"beta", c.beta},
      {"num_negatives", c.num_negatives},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"seed", c.seed},
      {"strategy", std::string(to_string(c.strategy))},
  };
}

std::vector<std::size_t> parse_cutoffs(std::string_view text) {
  std::vector<std::size_t> out;
  for (const double v : parse_values(text)) {
    if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw Error("cutoff list '" + std::string(text) + "' must hold positive integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> parse_values(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto token = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
      throw Error("malformed value list '" + std::string(text) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

PreparedData load_prepared(const fs::path& dir) {
  const auto meta = read_json(dir / "meta.json");
  const auto m = meta.at("num_users").get<std::size_t>();
  const auto n = meta.at("num_items").get<std::size_t>();
  const auto train_bytes = read_file(dir / "train.csv");
  const auto test_bytes = read_file(dir / "test.csv");
  const auto parse = [&](const std::string& bytes, const char* name) {
    std::istringstream in(bytes);
    try {
      return read_indexed_pairs(in, m, n);
    } catch (const ParseError& e) {
      throw Error((dir / name).string() + ": " + e.what());
    }
  };
  PreparedData data;
  data.split = make_split(parse(train_bytes, "train.csv"), parse(test_bytes, "test.csv"));
  data.fingerprint = fnv1a64(test_bytes, fnv1a64(train_bytes));
  return data;
}

void cmd_prepare(const PrepareArgs& args) {
  std::ifstream in(args.input, std::ios::binary);
  if (!in) throw Error("cannot open " + args.input.string());
  InteractionDataset dataset;
  try {
    dataset = parse_interactions(in, args.format);
  } catch (const ParseError& e) {
    throw Error(args.input.string() + ": " + e.what());
  }
  const auto split = split_holdout(dataset, args.test_fraction, args.seed);

  fs::create_directories(args.out);
  {
    auto out = open_out(args.out / "train.csv");
    write_csv_pairs(out, split.train);
  }
  {
    auto out = open_out(args.out / "test.csv");
    write_csv_pairs(out, split.test);
  }
  write_json(args.out / "meta.json",
             {
                 {"num_users", dataset.num_users()},
                 {"num_items", dataset.num_items()},
                 {"num_interactions", dataset.size()},
                 {"num_train", split.train.size()},
                 {"num_test", split.test.size()},
                 {"num_evaluable_users", split.evaluable_users.size()},
                 {"density", density(dataset)},
                 {"test_fraction", args.test_fraction},
                 {"seed", args.seed},
                 {"format", args.format == InteractionFormat::MovieLensTab ? "movielens" : "csv"},
             });
}

namespace {

TrainConfig load_config(const std::optional<fs::path>& path, const ConfigOverrides& flags) {
  return resolve_config(path ? read_json(*path) : nlohmann::json(), flags);
}

}  // namespace

void cmd_train(const TrainArgs& args) {
  const auto total_start = std::chrono::steady_clock::now();
  const auto cfg = load_config(args.config, args.overrides);
  const auto data = load_prepared(args.data);
  const std::size_t threads = default_threads();

  auto model = init_model(data.split.train.num_users(), data.split.train.num_items(),
                          cfg.dim, cfg.seed);
  const auto stats = train(model, data.split, cfg, {}, threads);
  const auto report = evaluate(model, data.split, args.cutoffs, threads);

  fs::create_directories(args.out);
  save_checkpoint(args.out / "model.bin", model);
  write_json(args.out / "model.json",
             {{"config", to_json(cfg)}, {"epochs_completed", stats.size()}, {"version", ONEBP_VERSION}});

  double train_seconds = 0.0;
  nlohmann::json epochs = nlohmann::json::array();
  {
    auto out = open_out(args.out / "epochs.csv");
    out << "epoch,mean_loss,seconds\n";
    for (const auto& s : stats) {
      out << s.epoch << ',' << format_real(s.mean_loss) << ',' << format_real(s.wall_seconds) << '\n';
      epochs.push_back({{"epoch", s.epoch}, {"mean_loss", s.mean_loss}, {"seconds", s.wall_seconds}});
      train_seconds += s.wall_seconds;
    }
  }
  const std::chrono::duration<double> total = std::chrono::steady_clock::now() - total_start;
  write_json(args.out / "manifest.json",
             {
                 {"version", ONEBP_VERSION},
                 {"config", to_json(cfg)},
                 {"dataset_fingerprint", hex64(data.fingerprint)},
                 {"epochs", epochs},
                 {"report", to_json(report)},
                 {"wall_seconds", {{"training", train_seconds}, {"total", total.count()}}},
             });
}

EvalReport cmd_evaluate(const EvaluateArgs& args) {
  if (args.cutoffs.empty()) throw Error("no cutoffs given");
  const auto model = load_checkpoint(args.checkpoint);
  const auto data = load_prepared(args.data);
  check_shape(model, data.split);
  const auto report = evaluate(model, data.split, args.cutoffs, default_threads());

  fs::create_directories(args.out);
  write_json(args.out / "report.json", to_json(report));
  auto out = open_out(args.out / "report.csv");
  write_report_csv(out, report);
  return report;
}

SweepAxis parse_axis(std::string_view name) {
  if (name == "beta") return SweepAxis::Beta;
  if (name == "num_negatives" || name == "negatives") return SweepAxis::NumNegatives;
  throw Error("unknown sweep axis '" + std::string(name) + "' (expected beta or num_negatives)");
}

void cmd_sweep(const SweepArgs& args) {
  if (args.values.empty()) throw Error("sweep needs at least one value");
  const auto base = load_config(args.config, args.overrides);
  const auto data = load_prepared(args.data);
  const std::size_t threads = default_threads();

  std::vector<std::pair<std::string, TrainConfig>> runs;
  for (const double v : args.values) {
    TrainConfig cfg = base;
    if (args.axis == SweepAxis::Beta) {
      cfg.beta = v;
      runs.emplace_back(format_real(v), cfg);
    } else {
      if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw Error("num_negatives values must be positive integers");
      }
      cfg.num_negatives = static_cast<std::size_t>(v);
      runs.emplace_back(std::to_string(cfg.num_negatives), cfg);
    }
    runs.back().second.validate();
  }

  fs::create_directories(args.out);
  auto out = open_out(args.out / "sweep.csv");
  out << "axis_value,metric,K,value\n";
  for (const auto& [label, cfg] : runs) {
    auto model = init_model(data.split.train.num_users(), data.split.train.num_items(),
                            cfg.dim, cfg.seed);
    train(model, data.split, cfg, {}, threads);
    const auto report = evaluate(model, data.split, args.cutoffs, threads);
    const std::pair<const char*, const std::map<std::size_t, double>*> metrics[] = {
        {"precision", &report.precision},
        {"recall", &report.recall},
        {"f1", &report.f1},
        {"ndcg", &report.ndcg},
    };
    for (const auto& [name, values] : metrics) {
      for (const std::size_t k : report.cutoffs) {
        out << label << ',' << name << ',' << k << ',' << format_real(values->at(k)) << '\n';
      }
    }
    out.flush();
    std::cerr << "sweep: " << label << " done, P@" << report.cutoffs.front() << " = "
              << report.precision.at(report.cutoffs.front()) << '\n';
  }
}

void cmd_cluster(const ClusterArgs& args) {
  const auto model = load_checkpoint(args.checkpoint);
  const auto data = load_prepared(args.data);
  check_shape(model, data.split);
  const auto points = item_points(model);
  const auto clustering = kmeans(points, model.dim(), args.clusters, args.max_iters, args.seed);
  const auto report = cluster_report(clustering, data.split, model, args.user, args.k);

  fs::create_directories(args.out);
  {
    auto out = open_out(args.out / "items_clustered.csv");
    write_items_clustered_csv(out, clustering, model);
  }
  nlohmann::json j{
      {"scope", args.user ? "user" : "all_users"},
      {"list_length", args.k},
      {"num_users", report.num_users},
      {"inertia", clustering.inertia},
      {"iterations", clustering.iterations},
      {"clusters", to_json(report)},
  };
  if (args.user) j["user"] = *args.user;
  write_json(args.out / "cluster_report.json", j);
}

void cmd_export_embeddings(const fs::path& checkpoint, const fs::path& out_dir) {
  const auto model = load_checkpoint(checkpoint);
  fs::create_directories(out_dir);
  auto out = open_out(out_dir / "embeddings.csv");
  write_embeddings_csv(out, model);
}

namespace {

void add_config_flags(CLI::App* cmd, std::string& config_path, ConfigOverrides& o,
                      std::string& strategy) {
  cmd->add_option("--config", config_path, "Flat JSON config (keys as TrainConfig fields)");
  cmd->add_option("--strategy", strategy, "twobp | onebp | useronlybp");
  cmd->add_option_function<double>("--beta", [&o](double v) { o.beta = v; }, "Moving-aggregation weight");
  cmd->add_option_function<double>("--lr", [&o](double v) { o.learning_rate = v; }, "Learning rate");
  cmd->add_option_function<std::size_t>("--dim", [&o](std::size_t v) { o.dim = v; }, "Embedding dimension");
  cmd->add_option_function<std::size_t>("--negatives", [&o](std::size_t v) { o.num_negatives = v; },
                                        "Negatives per positive");
  cmd->add_option_function<std::size_t>("--batch-size", [&o](std::size_t v) { o.batch_size = v; },
                                        "Mini-batch size");
  cmd->add_option_function<std::size_t>("--epochs", [&o](std::size_t v) { o.epochs = v; }, "Epochs");
  cmd->add_option_function<std::uint64_t>("--seed", [&o](std::uint64_t v) { o.seed = v; }, "Master seed");
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Two-tower one-class collaborative filtering with swappable backpropagation strategies"};
  app.set_version_flag("--version", ONEBP_VERSION);
  app.require_subcommand(1);

  std::string data, out, config_path, strategy, format = "movielens", cutoffs = "5,10,20";
  std::string checkpoint, input, axis, values;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  std::size_t clusters = 6, list_len = 10, max_iters = 300;
  std::optional<UserIndex> user;
  ConfigOverrides overrides;

  auto* prepare = app.add_subcommand("prepare", "Parse a log, split it, write train/test CSVs");
  prepare->add_option("--input", input, "Interaction log")->required();
  prepare->add_option("--format", format, "movielens | csv")->check(CLI::IsMember({"movielens", "csv"}));
  prepare->add_option("--test-fraction", test_fraction, "Held-out fraction per user");
  prepare->add_option("--seed", seed, "Split seed");
  prepare->add_option("--out", out, "Output directory")->required();

  auto* train_cmd = app.add_subcommand("train", "Train a model on a prepared split");
  train_cmd->add_option("--data", data, "Prepared data directory")->required();
  add_config_flags(train_cmd, config_path, overrides, strategy);
  train_cmd->add_option("--k", cutoffs, "Cutoffs for the final report");
  train_cmd->add_option("--out", out, "Output directory")->required();

  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", checkpoint, "model.bin")->required();
  eval_cmd->add_option("--data", data, "Prepared data directory")->required();
  eval_cmd->add_option("--k", cutoffs, "Comma-separated cutoffs");
  eval_cmd->add_option("--out", out, "Output directory")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate across one hyperparameter");
  sweep_cmd->add_option("--data", data, "Prepared data directory")->required();
  add_config_flags(sweep_cmd, config_path, overrides, strategy);
  sweep_cmd->add_option("--axis", axis, "beta | num_negatives")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated axis values")->required();
  sweep_cmd->add_option("--k", cutoffs, "Comma-separated cutoffs");
  sweep_cmd->add_option("--out", out, "Output directory")->required();

  auto* cluster_cmd = app.add_subcommand("cluster", "KMeans over item embeddings with per-cluster stats");
  cluster_cmd->add_option("--checkpoint", checkpoint, "model.bin")->required();
  cluster_cmd->add_option("--data", data, "Prepared data directory")->required();
  cluster_cmd->add_option("--clusters", clusters, "Number of clusters");
  cluster_cmd->add_option_function<UserIndex>("--user", [&user](UserIndex u) { user = u; },
                                              "Report on one user instead of all");
  cluster_cmd->add_option("--k", list_len, "Recommendation list length");
  cluster_cmd->add_option("--max-iters", max_iters, "Lloyd iteration cap");
  cluster_cmd->add_option("--seed", seed, "Seeding for k-means++");
  cluster_cmd->add_option("--out", out, "Output directory")->required();

  auto* export_cmd = app.add_subcommand("export-embeddings", "Dump a checkpoint as CSV");
  export_cmd->add_option("--checkpoint", checkpoint, "model.bin")->required();
  export_cmd->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!strategy.empty()) overrides.strategy = parse_strategy(strategy);
    const std::optional<fs::path> config =
        config_path.empty() ? std::nullopt : std::optional<fs::path>(config_path);

    if (prepare->parsed()) {
      cmd_prepare({input,
                   format == "csv" ? InteractionFormat::CsvPairs : InteractionFormat::MovieLensTab,
                   test_fraction, seed, out});
    } else if (train_cmd->parsed()) {
      cmd_train({data, config, overrides, parse_cutoffs(cutoffs), out});
    } else if (eval_cmd->parsed()) {
      cmd_evaluate({checkpoint, data, parse_cutoffs(cutoffs), out});
    } else if (sweep_cmd->parsed()) {
      cmd_sweep({data, config, overrides, parse_axis(axis), parse_values(values),
                 parse_cutoffs(cutoffs), out});
    } else if (cluster_cmd->parsed()) {
      cmd_cluster({checkpoint, data, clusters, user, list_len, max_iters, seed, out});
    } else if (export_cmd->parsed()) {
      cmd_export_embeddings(checkpoint, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "onebp: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace onebp::cli
