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

#ifndef CGCD_PIPELINE_SCENARIO_H_
#define CGCD_PIPELINE_SCENARIO_H_

#include <set>
#include <vector>

#include "cgcd/matrix.h"
#include "cgcd/pipeline/config.h"

namespace cgcd {

// A staged dataset: a labelled initial set, T unlabelled step sets (with
// ground truth kept apart for evaluation only) and a held-out evaluation set.
struct ScenarioData {
  RowMatrix initial_features;
  std::vector<int> initial_labels;
  std::vector<RowMatrix> step_features;
  std::vector<std::vector<int>> step_truth;  // may be empty per step
  RowMatrix eval_features;
  std::vector<int> eval_labels;

  std::size_t steps() const { return step_features.size(); }
  std::set<int> initial_classes() const;
  // Classes introduced up to and including `step` (0 = initial stage only).
  std::set<int> seen_classes(std::size_t step) const;
};

struct SyntheticScenario {
  ScenarioData data;
  RowMatrix class_means;  // one unit row per class
  int initial_class_count = 0;
  std::vector<std::vector<int>> novel_classes_per_step;
};

// Classes are caps on the unit sphere of the raw-feature space. Classes
// [0, M0) form the initial stage; the remaining classes are dealt to steps
// round-robin. Old-class data not used initially is spread across the steps.
// Deterministic in cfg.seed.
SyntheticScenario generate_synthetic_scenario(const ScenarioConfig& cfg);

// Smallest angle (radians) between two class means.
double min_mean_angle(const RowMatrix& class_means);

}  // namespace cgcd

#endif  // CGCD_PIPELINE_SCENARIO_H_
