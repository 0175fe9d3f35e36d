// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cgcd_cli/commands.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "cgcd/error.h"
#include "cgcd/io/checkpoint.h"
#include "cgcd/io/config_file.h"
#include "cgcd/io/csv.h"
#include "cgcd/io/json_io.h"
#include "cgcd/pipeline/runner.h"
#include "cgcd/pipeline/scenario.h"
#include "cgcd_cli/dataset_dir.h"

namespace cgcd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr std::string_view kRunFormat = "cgcd-run-v1";

// Files are written into a hidden sibling directory and moved into place
// only when the command succeeds.
class Staging {
 public:
  explicit Staging(const fs::path& out_dir) : out_dir_(out_dir) {
    fs::create_directories(out_dir_);
    dir_ = out_dir_ / (".cgcd-partial-" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directory(dir_);
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;
  ~Staging() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  const fs::path& dir() const { return dir_; }

  void commit() {
    for (const auto& entry : fs::directory_iterator(dir_)) {
      fs::rename(entry.path(), out_dir_ / entry.path().filename());
    }
  }

 private:
  fs::path out_dir_;
  fs::path dir_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw std::runtime_error("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::uint64_t> resolve_seed(
    const std::optional<std::uint64_t>& flag) {
  if (flag) return flag;
  const char* env = std::getenv("CGCD_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string_view(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("CGCD_SEED is not an unsigned integer: ") +
                      env);
  }
}

ScenarioConfig load_with_seed(const std::string& path,
                              const std::optional<std::uint64_t>& flag) {
  ScenarioConfig cfg = io::load_config(path);
  if (const auto seed = resolve_seed(flag)) {
    cfg.seed = *seed;
    cfg.train.seed = *seed;
  }
  return cfg;
}

void cmd_generate(const std::string& config_path, const std::string& out_dir,
                  const std::optional<std::uint64_t>& seed) {
  const ScenarioConfig cfg = load_with_seed(config_path, seed);
  const SyntheticScenario scenario = generate_synthetic_scenario(cfg);
  Staging staging(out_dir);
  write_dataset_dir(staging.dir(), scenario.data, io::format_config(cfg),
                    cfg.seed);
  staging.commit();
}

void cmd_run(const std::string& config_path, const std::string& data_dir,
             const std::string& out_dir,
             const std::optional<std::uint64_t>& seed, std::ostream& out) {
  const ScenarioConfig cfg = load_with_seed(config_path, seed);
  const ScenarioData data = read_dataset_dir(data_dir);
  if (data.initial_features.cols() != cfg.input_dim) {
    throw ManifestMismatchError(
        "dataset has " + std::to_string(data.initial_features.cols()) +
        " input features but the config says input_dim = " +
        std::to_string(cfg.input_dim));
  }
  if (data.steps() != static_cast<std::size_t>(cfg.steps)) {
    throw ManifestMismatchError("dataset has " + std::to_string(data.steps()) +
                                " steps but the config says steps = " +
                                std::to_string(cfg.steps));
  }

  const auto start = std::chrono::steady_clock::now();
  const ScenarioRun run = run_pipeline(data, cfg);
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  Staging staging(out_dir);
  ordered_json reports = ordered_json::array();
  for (const StageReport& report : run.reports) {
    const std::string name = "stage_" + std::to_string(report.step) + ".json";
    write_text(staging.dir() / name, io::stage_report_json(report));
    reports.push_back(name);
  }
  const std::string metrics = io::scenario_metrics_json(run.metrics);
  write_text(staging.dir() / "metrics.json", metrics);

  io::Checkpoint ckpt{run.final_state.model, run.final_state.classifier, {},
                      cfg.recall_ks, run.metrics.steps};
  ckpt.history.pop_back();
  const std::set<int> initial = data.initial_classes();
  ckpt.initial_classes.assign(initial.begin(), initial.end());
  io::write_checkpoint(staging.dir() / "checkpoint.json", ckpt);

  ordered_json manifest;
  manifest["format_version"] = kRunFormat;
  manifest["seed"] = cfg.seed;
  manifest["config"] = io::format_config(cfg);
  manifest["data_dir"] = fs::absolute(data_dir).string();
  manifest["dataset_manifest_fnv1a"] =
      fnv1a_hex(read_text(fs::path(data_dir) / kManifestName));
  manifest["reports"] = std::move(reports);
  manifest["metrics"] = "metrics.json";
  manifest["checkpoint"] = "checkpoint.json";
  manifest["timings"] = {{"stage_seconds", run.stage_seconds},
                         {"total_seconds", total}};
  write_text(staging.dir() / "run_manifest.json", manifest.dump(2) + "\n");
  staging.commit();
  out << metrics;
}

void cmd_eval(const std::string& checkpoint_path, const std::string& eval_csv,
              std::ostream& out) {
  const io::Checkpoint ckpt = io::read_checkpoint(checkpoint_path);
  const io::LabeledRows rows = io::read_dataset_csv(eval_csv);
  for (int y : rows.labels) {
    if (y < 0) {
      throw FormatError(eval_csv + ": evaluation rows need ground-truth labels");
    }
  }
  if (rows.features.cols() != ckpt.model.input_dim()) {
    throw FormatError(eval_csv + " has " +
                      std::to_string(rows.features.cols()) +
                      " features but the model expects " +
                      std::to_string(ckpt.model.input_dim()));
  }
  const ScenarioMetrics metrics =
      io::evaluate_checkpoint(ckpt, rows.features, rows.labels);
  out << io::scenario_metrics_json(metrics);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Continual generalized category discovery", "cgcd"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log training progress to stderr");

  std::string config_path;
  std::string data_dir;
  std::string out_dir;
  std::string checkpoint;
  std::string eval_csv;
  std::optional<std::uint64_t> seed;

  CLI::App* gen = app.add_subcommand("generate", "Write a synthetic dataset");
  gen->add_option("--config", config_path, "INI config file")->required();
  gen->add_option("--out-dir", out_dir, "Output directory")->required();
  gen->add_option("--seed", seed, "Overrides the config seeds");

  CLI::App* run = app.add_subcommand("run", "Train and evaluate a scenario");
  run->add_option("--config", config_path, "INI config file")->required();
  run->add_option("--data-dir", data_dir, "Dataset directory")->required();
  run->add_option("--out-dir", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Overrides the config seeds");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--checkpoint", checkpoint, "checkpoint.json from run")
      ->required();
  eval->add_option("--eval-csv", eval_csv, "Labelled evaluation CSV")
      ->required();

  std::vector<std::string> argv_storage = {"cgcd"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
  try {
    if (gen->parsed()) {
      cmd_generate(config_path, out_dir, seed);
    } else if (run->parsed()) {
      cmd_run(config_path, data_dir, out_dir, seed, out);
    } else if (eval->parsed()) {
      cmd_eval(checkpoint, eval_csv, out);
    }
  } catch (const MissingFileError& e) {
    err << "error: " << e.what() << "\n";
    return kExitMissing;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace cgcd::cli
