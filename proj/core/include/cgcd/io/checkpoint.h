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

#ifndef CGCD_IO_CHECKPOINT_H_
#define CGCD_IO_CHECKPOINT_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cgcd/embedding.h"
#include "cgcd/evt.h"
#include "cgcd/matrix.h"
#include "cgcd/metrics.h"

namespace cgcd::io {

inline constexpr std::string_view kCheckpointFormat = "cgcd-ckpt-v1";

struct Checkpoint {
  EmbeddingModel model;
  PsiClassifier classifier;
  std::vector<int> initial_classes;
  std::vector<int> recall_ks;
  // Metrics of every stage before the final one, so offline evaluation can
  // rebuild forgetting and discovery.
  std::vector<StepMetrics> history;
};

std::string format_checkpoint(const Checkpoint& ckpt);
// Throws VersionError for another format tag and FormatError for malformed
// or truncated text.
Checkpoint parse_checkpoint(std::string_view text);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Evaluates the checkpointed model as the final stage on every given row.
// Rows of classes the model never saw land in the Unknown bucket.
ScenarioMetrics evaluate_checkpoint(const Checkpoint& ckpt,
                                    const RowMatrix& features,
                                    std::span<const int> labels);

}  // namespace cgcd::io

#endif  // CGCD_IO_CHECKPOINT_H_
