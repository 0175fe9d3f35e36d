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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <set>
#include <stdexcept>
#include <vector>

#include "cgcd/pipeline/runner.h"
#include "cgcd/pipeline/scenario.h"
#include "cgcd/pipeline/stages.h"
#include "support/oracles.h"

namespace cgcd {
namespace {

ScenarioConfig reference_config() {
  ScenarioConfig cfg;
  cfg.total_classes = 13;
  cfg.steps = 1;
  cfg.samples_per_class = 100;
  cfg.cluster_spread = 0.1;
  cfg.input_dim = 32;
  cfg.seed = 1;
  cfg.evt.reject_threshold = 0.999;
  cfg.train.epochs_pa = 15;
  cfg.train.epochs_evt = 15;
  cfg.train.epochs_continual = 10;
  cfg.train.seed = 1;
  return cfg;
}

ScenarioConfig small_config() {
  ScenarioConfig cfg = reference_config();
  cfg.total_classes = 6;
  cfg.initial_class_fraction = 0.67;
  cfg.samples_per_class = 40;
  cfg.input_dim = 12;
  cfg.model.hidden_dims = {16};
  cfg.model.embedding_dim = 8;
  cfg.train.epochs_pa = 4;
  cfg.train.epochs_evt = 2;
  cfg.train.epochs_continual = 2;
  return cfg;
}

TEST(GenerateScenario, ReferenceSplitArithmetic) {
  const SyntheticScenario s = generate_synthetic_scenario(reference_config());
  EXPECT_EQ(s.initial_class_count, 10);
  EXPECT_EQ(s.data.initial_features.rows(), 640u);
  EXPECT_EQ(s.data.eval_features.rows(), 260u);
  ASSERT_EQ(s.data.steps(), 1u);
  EXPECT_EQ(s.data.step_features[0].rows(), 400u);
  EXPECT_EQ(s.data.step_truth[0].size(), 400u);
  EXPECT_EQ(s.novel_classes_per_step[0], (std::vector<int>{10, 11, 12}));
  EXPECT_EQ(s.data.initial_classes().size(), 10u);
  EXPECT_EQ(s.data.seen_classes(1).size(), 13u);
  EXPECT_EQ(s.data.initial_features.cols(), 32u);
}

TEST(GenerateScenario, NovelClassesDealtRoundRobin) {
  ScenarioConfig cfg = reference_config();
  cfg.steps = 2;
  const SyntheticScenario s = generate_synthetic_scenario(cfg);
  EXPECT_EQ(s.novel_classes_per_step[0], (std::vector<int>{10, 12}));
  EXPECT_EQ(s.novel_classes_per_step[1], (std::vector<int>{11}));
  // 16 leftover samples per old class split 8 / 8.
  EXPECT_EQ(s.data.step_features[0].rows(), 80u + 160u);
  EXPECT_EQ(s.data.step_features[1].rows(), 80u + 80u);
  EXPECT_EQ(s.data.seen_classes(1).size(), 12u);
}

TEST(GenerateScenario, SamplesAreUnitNormAndMeansSeparated) {
  const ScenarioConfig cfg = reference_config();
  const SyntheticScenario s = generate_synthetic_scenario(cfg);
  EXPECT_GT(min_mean_angle(s.class_means), std::acos(cfg.max_mean_cosine));
  for (std::size_t i = 0; i < s.data.eval_features.rows(); ++i) {
    double sq = 0.0;
    for (double v : s.data.eval_features.row(i)) sq += v * v;
    EXPECT_NEAR(sq, 1.0, 1e-12);
  }
}

TEST(GenerateScenario, SpreadIsRmsAngle) {
  ScenarioConfig cfg = reference_config();
  cfg.samples_per_class = 400;
  const SyntheticScenario s = generate_synthetic_scenario(cfg);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < s.data.eval_features.rows(); ++i) {
    const auto mean = s.class_means.row(
        static_cast<std::size_t>(s.data.eval_labels[i]));
    double c = 0.0;
    for (std::size_t k = 0; k < mean.size(); ++k) {
      c += mean[k] * s.data.eval_features.row(i)[k];
    }
    const double a = std::acos(std::min(1.0, c));
    sum_sq += a * a;
  }
  const double rms =
      std::sqrt(sum_sq / static_cast<double>(s.data.eval_features.rows()));
  EXPECT_NEAR(rms, cfg.cluster_spread, 0.01);
}

TEST(GenerateScenario, DeterministicInSeed) {
  const ScenarioConfig cfg = reference_config();
  const SyntheticScenario a = generate_synthetic_scenario(cfg);
  const SyntheticScenario b = generate_synthetic_scenario(cfg);
  EXPECT_EQ(a.data.initial_features, b.data.initial_features);
  EXPECT_EQ(a.data.step_features, b.data.step_features);
  EXPECT_EQ(a.data.step_truth, b.data.step_truth);
  ScenarioConfig other = cfg;
  other.seed = 2;
  EXPECT_NE(generate_synthetic_scenario(other).data.initial_features,
            a.data.initial_features);
}

TEST(GenerateScenario, Errors) {
  ScenarioConfig empty_step = reference_config();
  empty_step.total_classes = 5;
  empty_step.initial_class_fraction = 0.99;
  empty_step.samples_per_class = 10;
  empty_step.initial_data_fraction = 0.99;
  EXPECT_THROW(generate_synthetic_scenario(empty_step), std::invalid_argument);

  ScenarioConfig crowded = reference_config();
  crowded.input_dim = 2;
  EXPECT_THROW(generate_synthetic_scenario(crowded), std::invalid_argument);

  ScenarioConfig one_class = reference_config();
  one_class.total_classes = 1;
  EXPECT_THROW(generate_synthetic_scenario(one_class), std::invalid_argument);
}

TEST(InitialStage, RejectsBadLabels) {
  const ScenarioConfig cfg = small_config();
  const SyntheticScenario s = generate_synthetic_scenario(cfg);
  const RowMatrix& x = s.data.initial_features;
  std::vector<int> single(x.rows(), 0);
  EXPECT_THROW(initial_stage(x, single, cfg), std::invalid_argument);
  std::vector<int> gap = s.data.initial_labels;
  for (int& l : gap) l *= 2;
  EXPECT_THROW(initial_stage(x, gap, cfg), std::invalid_argument);
  ScenarioConfig wrong_dim = cfg;
  wrong_dim.input_dim = cfg.input_dim + 1;
  EXPECT_THROW(initial_stage(x, s.data.initial_labels, wrong_dim),
               std::invalid_argument);
}

TEST(InitialStage, ProducesOneProxyPerClassAndLossHistory) {
  const ScenarioConfig cfg = small_config();
  const SyntheticScenario s = generate_synthetic_scenario(cfg);
  const InitialStageResult r =
      initial_stage(s.data.initial_features, s.data.initial_labels, cfg);
  EXPECT_EQ(r.state.proxies().class_count, s.initial_class_count);
  EXPECT_EQ(r.state.proxies().size(),
            static_cast<std::size_t>(s.initial_class_count));
  EXPECT_EQ(r.pa_losses.size(), static_cast<std::size_t>(cfg.train.epochs_pa));
  EXPECT_EQ(r.evt_losses.size(), static_cast<std::size_t>(cfg.train.epochs_evt));
  for (const EpochLosses& e : r.pa_losses) EXPECT_TRUE(std::isfinite(e.total));
  EXPECT_EQ(r.state.model.layer_dims(), cfg.layer_dims());
}

TEST(ContinualStage, PartitionsAndAddsNewProxies) {
  const ScenarioConfig cfg = small_config();
  const SyntheticScenario s = generate_synthetic_scenario(cfg);
  const InitialStageResult init =
      initial_stage(s.data.initial_features, s.data.initial_labels, cfg);
  const RowMatrix& x = s.data.step_features[0];
  std::unique_ptr<bool[]> novel(new bool[x.rows()]);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    novel[i] = s.data.step_truth[0][i] >= s.initial_class_count;
  }
  const ContinualStageResult r = continual_stage(
      1, x, init.state, cfg, std::span<const bool>(novel.get(), x.rows()));
  const StageReport& rep = r.report;
  EXPECT_EQ(rep.step, 1);
  EXPECT_EQ(rep.known_count + rep.unknown_count, x.rows());
  EXPECT_EQ(r.labels.size(), x.rows());
  EXPECT_EQ(r.flagged_unknown.size(), x.rows());
  ASSERT_TRUE(rep.novelty_detection_accuracy.has_value());
  EXPECT_GE(*rep.novelty_detection_accuracy, 0.0);
  EXPECT_LE(*rep.novelty_detection_accuracy, 1.0);
  EXPECT_LE(rep.kept_proxy_count, rep.discovered_cluster_count);
  const ProxySet& proxies = r.state.proxies();
  EXPECT_EQ(proxies.size(),
            init.state.proxies().size() + rep.kept_proxy_count);
  for (std::size_t i = 0; i < proxies.size(); ++i) {
    const int expected_origin = i < init.state.proxies().size() ? 0 : 1;
    EXPECT_EQ(proxies.proxies[i].origin_step, expected_origin);
  }
  EXPECT_EQ(rep.losses.size(), static_cast<std::size_t>(cfg.train.epochs_continual));
}

TEST(EvaluateState, OldOnlyRowsHaveNoNewAccuracy) {
  const ScenarioConfig cfg = small_config();
  const SyntheticScenario s = generate_synthetic_scenario(cfg);
  const InitialStageResult init =
      initial_stage(s.data.initial_features, s.data.initial_labels, cfg);
  const std::vector<int>& truth = s.data.initial_labels;
  std::unique_ptr<bool[]> is_old(new bool[truth.size()]);
  for (std::size_t i = 0; i < truth.size(); ++i) is_old[i] = true;
  const Evaluation e =
      evaluate_state(init.state, s.data.initial_features, truth,
                     std::span<const bool>(is_old.get(), truth.size()), 0);
  ASSERT_EQ(e.predictions.size(), truth.size());
  std::vector<int> predictions = e.predictions;
  EXPECT_DOUBLE_EQ(e.metrics.m_all,
                   testing::brute_force_accuracy(predictions, truth));
  EXPECT_DOUBLE_EQ(e.metrics.m_all, e.metrics.m_old);
  EXPECT_FALSE(e.metrics.m_new.has_value());
  EXPECT_EQ(e.metrics.step, 0);
}

TEST(RunScenario, ReferenceScenarioDiscoversNovelClasses) {
  const ScenarioRun run = run_scenario(reference_config());
  ASSERT_EQ(run.reports.size(), 2u);
  ASSERT_EQ(run.metrics.steps.size(), 2u);
  EXPECT_EQ(run.reports[0].losses.size(), 30u);
  EXPECT_DOUBLE_EQ(run.metrics.initial_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(run.metrics.steps[1].m_all, 1.0);
  EXPECT_EQ(run.metrics.steps[1].estimated_category_count, 13);
  ASSERT_TRUE(run.reports[1].novelty_detection_accuracy.has_value());
  EXPECT_DOUBLE_EQ(*run.reports[1].novelty_detection_accuracy, 1.0);
  ASSERT_TRUE(run.metrics.m_d.has_value());
  EXPECT_EQ(run.metrics.m_f, 0.0);
  EXPECT_EQ(run.metrics.recall_at_k.size(), 4u);
  EXPECT_EQ(run.stage_seconds.size(), 2u);
}

TEST(RunScenario, TightClustersScorePerfectly) {
  ScenarioConfig cfg = reference_config();
  cfg.cluster_spread = 1e-3;
  const ScenarioRun run = run_scenario(cfg);
  EXPECT_DOUBLE_EQ(run.metrics.steps.back().m_all, 1.0);
}

TEST(RunScenario, ZeroStepsHasNoDiscovery) {
  ScenarioConfig cfg = small_config();
  cfg.steps = 0;
  const ScenarioRun run = run_scenario(cfg);
  EXPECT_EQ(run.reports.size(), 1u);
  EXPECT_EQ(run.metrics.steps.size(), 1u);
  EXPECT_FALSE(run.metrics.m_d.has_value());
  EXPECT_EQ(run.metrics.m_f, 0.0);
}

TEST(RunScenario, DeterministicForFixedSeeds) {
  ScenarioConfig cfg = small_config();
  cfg.steps = 2;
  cfg.total_classes = 8;
  cfg.initial_class_fraction = 0.5;
  const ScenarioRun a = run_scenario(cfg);
  const ScenarioRun b = run_scenario(cfg);
  ASSERT_EQ(a.metrics.steps.size(), b.metrics.steps.size());
  for (std::size_t t = 0; t < a.metrics.steps.size(); ++t) {
    EXPECT_EQ(a.metrics.steps[t].m_all, b.metrics.steps[t].m_all);
    EXPECT_EQ(a.metrics.steps[t].m_new, b.metrics.steps[t].m_new);
  }
  EXPECT_EQ(a.final_state.model, b.final_state.model);
  EXPECT_EQ(a.final_state.proxies(), b.final_state.proxies());
}

}  // namespace
}  // namespace cgcd
