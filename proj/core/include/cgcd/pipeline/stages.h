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

#ifndef CGCD_PIPELINE_STAGES_H_
#define CGCD_PIPELINE_STAGES_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cgcd/embedding.h"
#include "cgcd/evt.h"
#include "cgcd/matrix.h"
#include "cgcd/metrics.h"
#include "cgcd/pipeline/config.h"

namespace cgcd {

// Feature extractor, proxies and the PSI classifier built from them.
struct ModelState {
  EmbeddingModel model;
  PsiClassifier classifier;

  const ProxySet& proxies() const { return classifier.proxies(); }
};

struct EpochLosses {
  int epoch = 0;
  double total = 0.0;  // mean over batches
  double pa = 0.0;
  double evt = 0.0;
  double fr = 0.0;
  double kd = 0.0;
};

struct StageReport {
  int step = 0;
  std::optional<double> novelty_detection_accuracy;
  std::size_t known_count = 0;
  std::size_t unknown_count = 0;
  std::size_t discovered_cluster_count = 0;  // before reduction
  std::size_t kept_proxy_count = 0;          // new proxies after reduction
  std::vector<EpochLosses> losses;
  StepMetrics metrics;
};

struct InitialStageResult {
  ModelState state;
  // Snapshot after proxy-anchor training, before the evt fine-tune.
  EmbeddingModel pa_model;
  ProxySet pa_proxies;
  std::vector<EpochLosses> pa_losses;
  std::vector<EpochLosses> evt_losses;
};

// Proxy-anchor pretraining, Weibull fitting, evt-loss fine-tuning with frozen
// Weibulls, then a Weibull refit for the final classifier. Labels must be the
// contiguous range [0, M0) with M0 >= 2.
InitialStageResult initial_stage(const RowMatrix& features,
                                 std::span<const int> labels,
                                 const ScenarioConfig& cfg);

struct ContinualStageResult {
  ModelState state;
  StageReport report;
  // Training label of every sample after reduction (pseudo-label or merged
  // cluster class).
  std::vector<int> labels;
  std::vector<bool> flagged_unknown;
};

// One continual step on unlabelled features. `novel_truth`, when given,
// marks which samples truly belong to unseen classes and is used only to
// report novelty-detection accuracy.
ContinualStageResult continual_stage(
    int step, const RowMatrix& features, const ModelState& previous,
    const ScenarioConfig& cfg,
    std::optional<std::span<const bool>> novel_truth = std::nullopt);

struct Evaluation {
  StepMetrics metrics;
  std::vector<int> predictions;  // class id or PsiClassifier::kUnknown
};

// Hungarian accuracy on the evaluation rows; the matching is computed once on
// all rows and reused for the old/new restrictions.
Evaluation evaluate_state(const ModelState& state, const RowMatrix& features,
                          std::span<const int> truth,
                          std::span<const bool> is_old, int step);

}  // namespace cgcd

#endif  // CGCD_PIPELINE_STAGES_H_
