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

#ifndef CGCD_METRICS_H_
#define CGCD_METRICS_H_

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cgcd/matrix.h"

namespace cgcd {

// Optimal one-to-one matching between predicted ids and true labels.
struct ClusterMatching {
  std::map<int, int> predicted_to_truth;  // unmatched predictions are absent
  std::size_t matched = 0;                // agreements under the matching
  std::size_t total = 0;

  double accuracy() const {
    return total == 0 ? 0.0
                      : static_cast<double>(matched) /
                            static_cast<double>(total);
  }
  // Accuracy over the samples where mask[i] is true.
  double accuracy_on(std::span<const int> predicted, std::span<const int> truth,
                     std::span<const bool> mask) const;
};

// Maximizes agreement with the Kuhn-Munkres algorithm on the (zero-padded)
// contingency table.
ClusterMatching match_clusters(std::span<const int> predicted,
                               std::span<const int> truth);

double hungarian_accuracy(std::span<const int> predicted,
                          std::span<const int> truth);

// Minimum-cost perfect assignment on a square cost matrix (row-major).
// Returns the column assigned to each row.
std::vector<std::size_t> solve_assignment(std::span<const double> cost,
                                          std::size_t n);

// max over t >= 1 of (history[0] - history[t]); 0 without continual steps.
double forgetting(std::span<const double> m_old_history);

// Mean of the novel-class accuracies over all continual steps.
double discovery(std::span<const double> m_new_history);

// Fraction of samples with a same-label sample among their k nearest
// neighbours by cosine distance, self excluded. Distance ties are broken by
// lower sample index.
std::map<int, double> recall_at_k(const RowMatrix& embeddings,
                                  std::span<const int> labels,
                                  std::span<const int> ks);

struct StepMetrics {
  int step = 0;
  double m_all = 0.0;
  double m_old = 0.0;
  std::optional<double> m_new;  // absent when no novel class is evaluated
  int estimated_category_count = 0;
};

struct ScenarioMetrics {
  std::vector<StepMetrics> steps;
  double initial_accuracy = 0.0;  // M_o at the initial stage
  double m_f = 0.0;
  std::optional<double> m_d;  // absent when there are no continual steps
  std::map<int, double> recall_at_k;
};

}  // namespace cgcd

#endif  // CGCD_METRICS_H_
