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

#include "cgcd_cli/dataset_dir.h"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "cgcd/io/csv.h"

namespace cgcd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string step_file_name(std::size_t step) {
  return "step_" + std::to_string(step) + ".csv";
}

std::string truth_file_name(std::size_t step) {
  return "step_" + std::to_string(step) + "_truth.csv";
}

void write_dataset_dir(const fs::path& dir, const ScenarioData& data,
                       std::string_view config_ini, std::uint64_t seed) {
  ordered_json files = ordered_json::array();
  auto emit = [&](const std::string& name, const std::string& role,
                  const std::string& text, std::size_t rows) {
    dump(dir / name, text);
    files.push_back({{"name", name},
                     {"role", role},
                     {"rows", rows},
                     {"fnv1a", fnv1a_hex(text)}});
  };

  emit("initial.csv", "initial",
       io::format_dataset_csv(data.initial_features, data.initial_labels),
       data.initial_labels.size());
  for (std::size_t t = 1; t <= data.steps(); ++t) {
    const RowMatrix& x = data.step_features[t - 1];
    const std::vector<int> unlabeled(x.rows(), -1);
    emit(step_file_name(t), "step", io::format_dataset_csv(x, unlabeled),
         x.rows());
    std::string truth = "label\n";
    for (int y : data.step_truth[t - 1]) truth += std::to_string(y) + "\n";
    emit(truth_file_name(t), "truth", truth, data.step_truth[t - 1].size());
  }
  emit("eval.csv", "eval",
       io::format_dataset_csv(data.eval_features, data.eval_labels),
       data.eval_labels.size());

  ordered_json manifest;
  manifest["format_version"] = kDatasetFormat;
  manifest["seed"] = seed;
  manifest["steps"] = data.steps();
  manifest["input_dim"] = data.initial_features.cols();
  manifest["config"] = config_ini;
  manifest["files"] = std::move(files);
  dump(dir / kManifestName, manifest.dump(2) + "\n");
}

ScenarioData read_dataset_dir(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifestName;
  ordered_json manifest;
  try {
    manifest = ordered_json::parse(slurp(manifest_path));
  } catch (const ordered_json::parse_error& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }

  std::size_t steps = 0;
  std::size_t input_dim = 0;
  std::vector<ordered_json> entries;
  try {
    const std::string version = manifest.at("format_version").get<std::string>();
    if (version != kDatasetFormat) {
      throw VersionError("dataset format '" + version +
                         "' is not supported (this build reads '" +
                         std::string(kDatasetFormat) + "')");
    }
    steps = manifest.at("steps").get<std::size_t>();
    input_dim = manifest.at("input_dim").get<std::size_t>();
    for (const ordered_json& f : manifest.at("files")) entries.push_back(f);
  } catch (const ordered_json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }

  std::vector<std::string> expected = {"initial.csv", "eval.csv"};
  for (std::size_t t = 1; t <= steps; ++t) {
    expected.push_back(step_file_name(t));
    expected.push_back(truth_file_name(t));
  }

  // Missing files are reported before any content check.
  std::map<std::string, std::string> contents;
  for (const std::string& name : expected) {
    if (!fs::exists(dir / name)) throw MissingFileError((dir / name).string());
  }
  std::vector<std::string> problems;
  std::set<std::string> listed;
  for (const ordered_json& f : entries) {
    const std::string name = f.at("name").get<std::string>();
    listed.insert(name);
    const fs::path path = dir / name;
    if (!fs::exists(path)) throw MissingFileError(path.string());
    std::string text = slurp(path);
    const std::string actual = fnv1a_hex(text);
    const std::string recorded = f.at("fnv1a").get<std::string>();
    if (actual != recorded) {
      problems.push_back(name + ": hash " + actual + " != manifest " +
                         recorded);
    }
    contents[name] = std::move(text);
  }
  for (const std::string& name : expected) {
    if (!listed.contains(name)) {
      problems.push_back(name + ": not listed in the manifest");
    }
  }
  if (!problems.empty()) {
    std::string msg = "dataset does not match " + manifest_path.string() + ":";
    for (const std::string& p : problems) msg += "\n  " + p;
    throw ManifestMismatchError(msg);
  }

  auto parse_labels = [](const std::string& text, const std::string& source) {
    std::vector<int> labels;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "label") {
      throw FormatError(source + ": expected a 'label' header");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        std::size_t used = 0;
        labels.push_back(std::stoi(line, &used));
        if (used != line.size()) throw std::invalid_argument(line);
      } catch (const std::exception&) {
        throw FormatError(source + ": cannot parse label '" + line + "'");
      }
    }
    return labels;
  };

  ScenarioData data;
  io::LabeledRows initial =
      io::parse_dataset_csv(contents.at("initial.csv"), "initial.csv");
  data.initial_features = std::move(initial.features);
  data.initial_labels = std::move(initial.labels);
  for (std::size_t t = 1; t <= steps; ++t) {
    const std::string name = step_file_name(t);
    io::LabeledRows rows = io::parse_dataset_csv(contents.at(name), name);
    std::vector<int> truth =
        parse_labels(contents.at(truth_file_name(t)), truth_file_name(t));
    if (truth.size() != rows.labels.size()) {
      throw ManifestMismatchError(truth_file_name(t) + " has " +
                                  std::to_string(truth.size()) +
                                  " rows but " + name + " has " +
                                  std::to_string(rows.labels.size()));
    }
    data.step_features.push_back(std::move(rows.features));
    data.step_truth.push_back(std::move(truth));
  }
  io::LabeledRows eval = io::parse_dataset_csv(contents.at("eval.csv"), "eval.csv");
  data.eval_features = std::move(eval.features);
  data.eval_labels = std::move(eval.labels);

  auto check_dim = [&](const RowMatrix& m, const std::string& name) {
    if (m.rows() > 0 && m.cols() != input_dim) {
      throw ManifestMismatchError(name + " has " + std::to_string(m.cols()) +
                                  " features but the manifest says " +
                                  std::to_string(input_dim));
    }
  };
  check_dim(data.initial_features, "initial.csv");
  for (std::size_t t = 1; t <= steps; ++t) {
    check_dim(data.step_features[t - 1], step_file_name(t));
  }
  check_dim(data.eval_features, "eval.csv");
  return data;
}

}  // namespace cgcd::cli
