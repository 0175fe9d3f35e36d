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

#include "cgcd/pipeline/runner.h"

#include <array>
#include <chrono>
#include <memory>
#include <set>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace cgcd {
namespace {

struct EvalSubset {
  RowMatrix features;
  std::vector<int> labels;
  std::unique_ptr<bool[]> is_old;
  std::size_t size = 0;
};

EvalSubset eval_subset(const ScenarioData& data, const std::set<int>& seen,
                       const std::set<int>& initial) {
  EvalSubset out;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.eval_labels.size(); ++i) {
    if (seen.contains(data.eval_labels[i])) rows.push_back(i);
  }
  out.features = data.eval_features.select(rows);
  out.size = rows.size();
  out.is_old = std::make_unique<bool[]>(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const int y = data.eval_labels[rows[j]];
    out.labels.push_back(y);
    out.is_old[j] = initial.contains(y);
  }
  return out;
}

StepMetrics evaluate_on(const ModelState& state, const EvalSubset& subset,
                        int step) {
  return evaluate_state(state, subset.features, subset.labels,
                        std::span<const bool>(subset.is_old.get(), subset.size),
                        step)
      .metrics;
}

double recall_at_1(const EmbeddingModel& model, const EvalSubset& subset) {
  const std::array<int, 1> k1{1};
  return recall_at_k(model.embed_all(subset.features), subset.labels, k1)
      .at(1);
}

}  // namespace

ScenarioRun run_pipeline(const ScenarioData& data, const ScenarioConfig& cfg) {
  cfg.validate();
  if (data.eval_labels.empty()) {
    throw std::invalid_argument("run_pipeline: empty evaluation set");
  }
  const std::set<int> initial = data.initial_classes();
  using Clock = std::chrono::steady_clock;
  const auto seconds_since = [](Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  Clock::time_point start = Clock::now();
  InitialStageResult init =
      initial_stage(data.initial_features, data.initial_labels, cfg);
  const EvalSubset eval0 = eval_subset(data, initial, initial);

  ScenarioRun run{.final_state = init.state};
  run.recall1_pa_only = recall_at_1(init.pa_model, eval0);
  run.recall1_after_evt = recall_at_1(init.state.model, eval0);

  StageReport first;
  first.step = 0;
  first.losses = init.pa_losses;
  for (EpochLosses e : init.evt_losses) {
    e.epoch += cfg.train.epochs_pa;
    first.losses.push_back(e);
  }
  first.metrics = evaluate_on(init.state, eval0, 0);
  run.metrics.initial_accuracy = first.metrics.m_old;
  run.stage_seconds.push_back(seconds_since(start));
  run.reports.push_back(std::move(first));
  spdlog::info("initial stage: M_o = {:.4f}", run.metrics.initial_accuracy);

  std::vector<double> m_old_history{run.metrics.initial_accuracy};
  std::vector<double> m_new_history;
  ModelState state = std::move(init.state);

  for (std::size_t t = 1; t <= data.steps(); ++t) {
    const int step = static_cast<int>(t);
    start = Clock::now();
    const std::vector<int>& truth = data.step_truth.size() >= t
                                        ? data.step_truth[t - 1]
                                        : std::vector<int>{};
    std::unique_ptr<bool[]> novel;
    std::optional<std::span<const bool>> novel_span;
    if (!truth.empty()) {
      const std::set<int> before = data.seen_classes(t - 1);
      novel = std::make_unique<bool[]>(truth.size());
      for (std::size_t i = 0; i < truth.size(); ++i) {
        novel[i] = !before.contains(truth[i]);
      }
      novel_span = std::span<const bool>(novel.get(), truth.size());
    }
    ContinualStageResult res = continual_stage(
        step, data.step_features[t - 1], state, cfg, novel_span);
    state = std::move(res.state);

    const EvalSubset eval_t = eval_subset(data, data.seen_classes(t), initial);
    res.report.metrics = evaluate_on(state, eval_t, step);
    m_old_history.push_back(res.report.metrics.m_old);
    if (res.report.metrics.m_new) {
      m_new_history.push_back(*res.report.metrics.m_new);
    }
    spdlog::info(
        "step {}: {} unknown, {} clusters, {} kept, M_all = {:.4f}", step,
        res.report.unknown_count, res.report.discovered_cluster_count,
        res.report.kept_proxy_count, res.report.metrics.m_all);
    run.metrics.steps.push_back(res.report.metrics);
    run.stage_seconds.push_back(seconds_since(start));
    run.reports.push_back(std::move(res.report));
  }

  run.metrics.steps.insert(run.metrics.steps.begin(),
                           run.reports.front().metrics);
  run.metrics.m_f = forgetting(m_old_history);
  if (!m_new_history.empty()) run.metrics.m_d = discovery(m_new_history);

  const std::set<int> all_seen = data.seen_classes(data.steps());
  const EvalSubset final_eval = eval_subset(data, all_seen, initial);
  run.metrics.recall_at_k = recall_at_k(state.model.embed_all(final_eval.features),
                                        final_eval.labels, cfg.recall_ks);
  run.final_state = std::move(state);
  return run;
}

ScenarioRun run_scenario(const ScenarioConfig& cfg) {
  const SyntheticScenario scenario = generate_synthetic_scenario(cfg);
  return run_pipeline(scenario.data, cfg);
}

}  // namespace cgcd
