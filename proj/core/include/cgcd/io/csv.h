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

#ifndef CGCD_IO_CSV_H_
#define CGCD_IO_CSV_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cgcd/matrix.h"

namespace cgcd::io {

// Rows of `label,f0,...,f{D-1}`. Label -1 marks an unlabeled row.
struct LabeledRows {
  RowMatrix features;
  std::vector<int> labels;
};

std::string format_dataset_csv(const RowMatrix& features,
                               std::span<const int> labels);
LabeledRows parse_dataset_csv(std::string_view text,
                              const std::string& source = "<memory>");

void write_dataset_csv(const std::filesystem::path& path,
                       const RowMatrix& features, std::span<const int> labels);
LabeledRows read_dataset_csv(const std::filesystem::path& path);

// Single-column `label` file holding ground truth for a step file.
void write_labels_csv(const std::filesystem::path& path,
                      std::span<const int> labels);
std::vector<int> read_labels_csv(const std::filesystem::path& path);

// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace cgcd::io

#endif  // CGCD_IO_CSV_H_
