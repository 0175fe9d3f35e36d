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

#ifndef CGCD_CLI_DATASET_DIR_H_
#define CGCD_CLI_DATASET_DIR_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "cgcd/error.h"
#include "cgcd/pipeline/scenario.h"

namespace cgcd::cli {

inline constexpr std::string_view kDatasetFormat = "cgcd-dataset-v1";
inline constexpr std::string_view kManifestName = "manifest.json";

// A dataset directory whose files disagree with its manifest.
class ManifestMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

std::string step_file_name(std::size_t step);
std::string truth_file_name(std::size_t step);

// Writes initial.csv, step_<t>.csv (labels -1), step_<t>_truth.csv,
// eval.csv and manifest.json into `dir`.
void write_dataset_dir(const std::filesystem::path& dir,
                       const ScenarioData& data, std::string_view config_ini,
                       std::uint64_t seed);

// Reads a dataset directory after checking every file against the manifest.
// Throws MissingFileError for absent files and ManifestMismatchError when
// hashes, file sets or shapes disagree.
ScenarioData read_dataset_dir(const std::filesystem::path& dir);

}  // namespace cgcd::cli

#endif  // CGCD_CLI_DATASET_DIR_H_
