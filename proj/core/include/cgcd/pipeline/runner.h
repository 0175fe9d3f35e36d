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

#ifndef CGCD_PIPELINE_RUNNER_H_
#define CGCD_PIPELINE_RUNNER_H_

#include <vector>

#include "cgcd/metrics.h"
#include "cgcd/pipeline/config.h"
#include "cgcd/pipeline/scenario.h"
#include "cgcd/pipeline/stages.h"

namespace cgcd {

struct ScenarioRun {
  ScenarioMetrics metrics;
  // reports[0] is the initial stage; its losses list the PA epochs followed
  // by the evt epochs.
  std::vector<StageReport> reports;
  ModelState final_state;
  // Recall@1 on the initial-class evaluation rows, before and after the evt
  // fine-tune.
  double recall1_pa_only = 0.0;
  double recall1_after_evt = 0.0;
  // Wall-clock seconds per stage, parallel to reports. Not part of any
  // deterministic output.
  std::vector<double> stage_seconds;
};

// Runs the initial stage and every continual step on prepared data. Truth
// labels of the step files are used only for reporting novelty accuracy.
ScenarioRun run_pipeline(const ScenarioData& data, const ScenarioConfig& cfg);

ScenarioRun run_scenario(const ScenarioConfig& cfg);

}  // namespace cgcd

#endif  // CGCD_PIPELINE_RUNNER_H_
