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

#include "cgcd/losses.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "support/gradient_cases.h"
#include "support/oracles.h"

namespace cgcd {
namespace {

using numerics::Tape;
using numerics::Var;
using testing::Vec;

ProxySet make_proxies(const std::vector<Vec>& vectors,
                      const std::vector<int>& classes) {
  ProxySet set;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    set.proxies.push_back(Proxy{vectors[i], classes[i], 0});
  }
  set.class_count = *std::max_element(classes.begin(), classes.end()) + 1;
  return set;
}

double pa_value(const std::vector<Vec>& z, const std::vector<int>& labels,
                const ProxySet& proxies, const LossConfig& cfg) {
  return pa_loss_value(LabeledBatch{testing::rows_to_matrix(z), labels},
                       proxies, cfg);
}

struct RandomInstance {
  std::vector<Vec> z;
  std::vector<int> labels;
  std::vector<Vec> proxies;
  std::vector<int> proxy_classes;
};

RandomInstance random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RandomInstance inst;
  const int classes = 2 + static_cast<int>(rng() % 3);
  const std::size_t d = 3 + rng() % 6;
  for (int c = 0; c < classes; ++c) {
    inst.proxies.push_back(testing::random_unit(d, rng));
    inst.proxy_classes.push_back(c);
  }
  inst.proxies.push_back(testing::random_unit(d, rng));
  inst.proxy_classes.push_back(0);
  const std::size_t n = 2 + rng() % 7;
  for (std::size_t i = 0; i < n; ++i) {
    inst.z.push_back(testing::random_unit(d, rng));
    inst.labels.push_back(static_cast<int>(rng() % static_cast<unsigned>(classes)));
  }
  return inst;
}

TEST(PaLoss, PositiveAtMarginGivesLogTwo) {
  LossConfig cfg;
  const double delta = cfg.delta;
  const Vec z = {delta, std::sqrt(1.0 - delta * delta)};
  const ProxySet proxies = make_proxies({{1.0, 0.0}}, {0});
  EXPECT_NEAR(pa_value({z}, {0}, proxies, cfg), std::log(2.0), 1e-12);
}

TEST(PaLoss, SaturatedPositiveIsNearZero) {
  LossConfig cfg;
  const ProxySet proxies = make_proxies({{1.0, 0.0}}, {0});
  const double expected = std::log1p(std::exp(-cfg.alpha * (1.0 - cfg.delta)));
  EXPECT_NEAR(pa_value({{1.0, 0.0}}, {0}, proxies, cfg), expected, 1e-15);
  EXPECT_LT(expected, 1e-12);
}

TEST(PaLoss, AbsentClassProxyFormsNegativeTerm) {
  LossConfig cfg;
  const ProxySet proxies = make_proxies({{1.0, 0.0}, {0.0, 1.0}}, {0, 1});
  // Class 1 is absent; its proxy sees the class-0 sample at cosine 0.
  const double neg = std::log1p(std::exp(cfg.alpha * (0.0 + cfg.delta)));
  const double pos = std::log1p(std::exp(-cfg.alpha * (1.0 - cfg.delta)));
  EXPECT_NEAR(pa_value({{1.0, 0.0}}, {0}, proxies, cfg), pos + neg, 1e-9);
}

TEST(PaLoss, MatchesLiteralOracle) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const RandomInstance inst = random_instance(seed);
    const ProxySet proxies = make_proxies(inst.proxies, inst.proxy_classes);
    for (bool all : {false, true}) {
      LossConfig cfg;
      cfg.negatives =
          all ? NegativeProxies::kAll : NegativeProxies::kAbsentFromBatch;
      const double expected = testing::literal_pa_loss(
          inst.z, inst.labels, inst.proxies, inst.proxy_classes, cfg.alpha,
          cfg.delta, all);
      EXPECT_NEAR(pa_value(inst.z, inst.labels, proxies, cfg), expected,
                  1e-9 * std::max(1.0, expected))
          << "seed " << seed << " all=" << all;
    }
  }
}

TEST(PaLoss, NonNegativeAndPermutationInvariant) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RandomInstance inst = random_instance(seed);
    const ProxySet proxies = make_proxies(inst.proxies, inst.proxy_classes);
    const LossConfig cfg;
    const double base = pa_value(inst.z, inst.labels, proxies, cfg);
    EXPECT_GE(base, 0.0);
    std::vector<std::size_t> order(inst.z.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Vec> z;
    std::vector<int> labels;
    for (std::size_t i : order) {
      z.push_back(inst.z[i]);
      labels.push_back(inst.labels[i]);
    }
    EXPECT_NEAR(pa_value(z, labels, proxies, cfg), base, 1e-12);
  }
}

TEST(PaLoss, LabelWithoutProxyThrows) {
  const ProxySet proxies = make_proxies({{1.0, 0.0}}, {0});
  Tape tape({});
  const ProxyNodes nodes = constant_proxies(tape, proxies);
  const std::vector<Var> z = {tape.constant(Vec{1.0, 0.0})};
  const std::vector<int> labels = {3};
  EXPECT_THROW(pa_loss(tape, z, labels, nodes, LossConfig{}),
               std::invalid_argument);
}

TEST(EvtLoss, HandExample) {
  // One class-0 sample at distance 0.5 from both proxies; class 1 is absent.
  const Vec z = {0.5, 0.5, std::sqrt(0.5)};
  const ProxySet proxies =
      make_proxies({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}, {0, 1});
  const std::vector<WeibullParams> w = {{2.0, 0.5, 10}, {2.0, 0.5, 10}};
  const double psi = std::exp(-1.0);
  const double expected = std::log(2.0 - psi) + std::log(1.0 + psi);
  const double got =
      evt_loss_value(LabeledBatch{testing::rows_to_matrix({z}), {0}}, proxies,
                     w, NegativeProxies::kAbsentFromBatch);
  EXPECT_NEAR(got, expected, 1e-12);
}

TEST(EvtLoss, MatchesLiteralOracle) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const RandomInstance inst = random_instance(seed);
    const ProxySet proxies = make_proxies(inst.proxies, inst.proxy_classes);
    std::mt19937_64 rng(seed * 7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<WeibullParams> w;
    std::vector<testing::ShapeScale> ws;
    for (std::size_t p = 0; p < inst.proxies.size(); ++p) {
      const double shape = 0.5 + 8.0 * u(rng);
      const double scale = 0.2 + 1.5 * u(rng);
      w.push_back({shape, scale, 10});
      ws.push_back({shape, scale});
    }
    for (bool all : {false, true}) {
      const double expected = testing::literal_evt_loss(
          inst.z, inst.labels, inst.proxies, inst.proxy_classes, ws, all);
      const double got = evt_loss_value(
          LabeledBatch{testing::rows_to_matrix(inst.z), inst.labels}, proxies,
          w, all ? NegativeProxies::kAll : NegativeProxies::kAbsentFromBatch);
      EXPECT_NEAR(got, expected, 1e-10) << "seed " << seed << " all=" << all;
    }
  }
}

TEST(EvtLoss, PositiveTermFallsAsSampleApproachesProxy) {
  const ProxySet proxies = make_proxies({{1.0, 0.0}}, {0});
  const std::vector<WeibullParams> w = {{2.0, 0.5, 10}};
  double previous = INFINITY;
  for (double angle = 1.5; angle >= 0.0; angle -= 0.25) {
    const Vec z = {std::cos(angle), std::sin(angle)};
    const double v =
        evt_loss_value(LabeledBatch{testing::rows_to_matrix({z}), {0}},
                       proxies, w, NegativeProxies::kAbsentFromBatch);
    EXPECT_LT(v, previous);
    previous = v;
  }
  EXPECT_NEAR(previous, 0.0, 1e-15);
}

TEST(EvtLoss, NegativeTermRisesAsSampleApproachesProxy) {
  const ProxySet proxies = make_proxies({{1.0, 0.0}, {0.0, 1.0}}, {0, 1});
  const std::vector<WeibullParams> w = {{2.0, 0.5, 10}, {2.0, 0.5, 10}};
  double previous = -1.0;
  for (double angle = 0.0; angle <= 1.5; angle += 0.25) {
    // Class-0 sample swinging toward the absent class-1 proxy.
    const Vec z = {std::cos(angle), std::sin(angle)};
    const double v =
        evt_loss_value(LabeledBatch{testing::rows_to_matrix({z}), {0}},
                       proxies, w, NegativeProxies::kAbsentFromBatch);
    EXPECT_GT(v, previous);
    previous = v;
  }
}

TEST(EvtLoss, MissingWeibullThrows) {
  const ProxySet proxies = make_proxies({{1.0, 0.0}, {0.0, 1.0}}, {0, 1});
  const std::vector<WeibullParams> w = {{2.0, 0.5, 10}};
  EXPECT_THROW(evt_loss_value(LabeledBatch{testing::rows_to_matrix({{1.0, 0.0}}), {0}},
                              proxies, w, NegativeProxies::kAll),
               std::invalid_argument);
}

TEST(KdLoss, Examples) {
  const RowMatrix a = testing::rows_to_matrix({{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_EQ(kd_loss_value(a, a), 0.0);
  const RowMatrix b = testing::rows_to_matrix({{1.0, 1.0}, {1.0, 1.0}});
  EXPECT_NEAR(kd_loss_value(a, b), 1.0, 1e-15);
  EXPECT_EQ(kd_loss_value(RowMatrix(0, 2), RowMatrix(0, 2)), 0.0);
}

TEST(KdLoss, MatchesLiteralOracle) {
  std::mt19937_64 rng(5);
  std::vector<Vec> old_z;
  std::vector<Vec> new_z;
  for (int i = 0; i < 3; ++i) {
    old_z.push_back(testing::random_unit(4, rng));
    new_z.push_back(testing::random_unit(4, rng));
  }
  EXPECT_NEAR(kd_loss_value(testing::rows_to_matrix(old_z),
                            testing::rows_to_matrix(new_z)),
              testing::literal_kd_loss(old_z, new_z), 1e-14);
}

TEST(KdLoss, LengthMismatchThrows) {
  Tape tape({});
  const std::vector<Var> a = {tape.constant(Vec{1.0, 0.0})};
  const std::vector<Var> b;
  EXPECT_THROW(kd_loss(tape, a, b), std::invalid_argument);
}

TEST(Replay, SamplesAreUnitNormAndLabelled) {
  const std::vector<Proxy> old = {{{1.0, 0.0, 0.0}, 0, 0},
                                  {{0.0, 1.0, 0.0}, 1, 0},
                                  {{0.0, 0.0, 1.0}, 2, 0}};
  const ReplayConfig cfg{0.05, 10};
  const LabeledBatch batch = sample_replay_features(old, cfg, 9);
  ASSERT_EQ(batch.embeddings.rows(), 30u);
  for (std::size_t i = 0; i < batch.embeddings.rows(); ++i) {
    const auto row = batch.embeddings.row(i);
    double sq = 0.0;
    for (double v : row) sq += v * v;
    EXPECT_NEAR(sq, 1.0, 1e-12);
    const int label = batch.labels[i];
    EXPECT_GT(row[static_cast<std::size_t>(label)], 0.8);
  }
  EXPECT_EQ(sample_replay_features(old, cfg, 9).embeddings, batch.embeddings);
  EXPECT_NE(sample_replay_features(old, cfg, 10).embeddings, batch.embeddings);
}

TEST(Replay, ZeroCountThrows) {
  const std::vector<Proxy> old = {{{1.0, 0.0}, 0, 0}};
  EXPECT_THROW(sample_replay_features(old, ReplayConfig{0.05, 0}, 1),
               std::invalid_argument);
}

TEST(Replay, TinySigmaOnSingleProxyIsNearZero) {
  const std::vector<Proxy> old = {{{1.0, 0.0}, 0, 0}};
  ProxySet set;
  set.proxies = old;
  set.class_count = 1;
  Tape tape({});
  const ProxyNodes nodes = constant_proxies(tape, set);
  const LossConfig cfg;
  const Var v =
      feature_replay_loss(tape, old, ReplayConfig{1e-9, 5}, nodes, cfg, 3);
  EXPECT_NEAR(tape.value(v), std::log1p(5.0 * std::exp(-cfg.alpha * (1.0 - cfg.delta))),
              1e-9);
}

TEST(Replay, EqualsPaLossOnMaterializedBatch) {
  const std::vector<Proxy> old = {{{1.0, 0.0, 0.0}, 0, 0},
                                  {{0.0, 1.0, 0.0}, 1, 0},
                                  {{0.0, 0.0, 1.0}, 2, 0}};
  ProxySet set;
  set.proxies = old;
  set.proxies.push_back({{0.6, 0.8, 0.0}, 3, 1});
  set.class_count = 4;
  const ReplayConfig replay{0.05, 10};
  const LossConfig cfg;
  Tape tape({});
  const ProxyNodes nodes = constant_proxies(tape, set);
  const double got =
      tape.value(feature_replay_loss(tape, old, replay, nodes, cfg, 77));
  const double expected =
      pa_loss_value(sample_replay_features(old, replay, 77), set, cfg);
  EXPECT_NEAR(got, expected, 1e-12);
}

class TotalLossTest : public ::testing::Test {
 protected:
  TotalLossTest() {
    set_ = make_proxies({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}},
                        {0, 1, 2});
    old_ = {set_.proxies[0], set_.proxies[1]};
    z_ = {Vec{0.8, 0.6, 0.0}, Vec{0.0, 0.6, 0.8}, Vec{0.0, 0.0, 1.0}};
    labels_ = {0, 2, 2};
    teacher_ = {Vec{1.0, 0.0, 0.0}, Vec{0.0, 0.8, 0.6}};
  }

  TotalLossTerms compute(Tape& tape, const LossConfig& cfg) {
    nodes_ = constant_proxies(tape, set_);
    zv_.clear();
    tv_.clear();
    for (const Vec& z : z_) zv_.push_back(tape.constant(z));
    for (const Vec& t : teacher_) tv_.push_back(tape.constant(t));
    TotalLossInputs in;
    in.embeddings = zv_;
    in.labels = labels_;
    in.proxies = &nodes_;
    in.kd_teacher = tv_;
    in.kd_student = std::span<const Var>(zv_).first(2);
    in.replay_proxies = old_;
    in.replay = ReplayConfig{0.05, 4};
    in.replay_seed = 11;
    return total_loss(tape, in, cfg);
  }

  ProxySet set_;
  std::vector<Proxy> old_;
  std::vector<Vec> z_;
  std::vector<int> labels_;
  std::vector<Vec> teacher_;
  ProxyNodes nodes_;
  std::vector<Var> zv_;
  std::vector<Var> tv_;
};

TEST_F(TotalLossTest, ZeroWeightsGiveZero) {
  LossConfig cfg;
  cfg.pa_weight = cfg.kd_weight = cfg.fr_weight = 0.0;
  Tape tape({});
  EXPECT_EQ(tape.value(compute(tape, cfg).total), 0.0);
}

TEST_F(TotalLossTest, OnlyPaWeightEqualsPaLoss) {
  LossConfig cfg;
  cfg.kd_weight = cfg.fr_weight = 0.0;
  Tape tape({});
  const double got = tape.value(compute(tape, cfg).total);
  EXPECT_DOUBLE_EQ(got, pa_value(z_, labels_, set_, cfg));
}

TEST_F(TotalLossTest, WeightedSumOfIndependentTerms) {
  LossConfig cfg;
  cfg.pa_weight = 0.5;
  cfg.kd_weight = 2.0;
  cfg.fr_weight = 1.5;
  Tape tape({});
  const TotalLossTerms terms = compute(tape, cfg);
  ASSERT_TRUE(terms.fr.has_value());
  ASSERT_TRUE(terms.kd.has_value());
  const double pa = pa_value(z_, labels_, set_, cfg);
  const double kd = testing::literal_kd_loss(teacher_, {z_[0], z_[1]});
  const double fr = pa_loss_value(
      sample_replay_features(old_, ReplayConfig{0.05, 4}, 11), set_, cfg);
  EXPECT_NEAR(tape.value(terms.pa), pa, 1e-12);
  EXPECT_NEAR(tape.value(*terms.kd), kd, 1e-12);
  EXPECT_NEAR(tape.value(*terms.fr), fr, 1e-12);
  EXPECT_NEAR(tape.value(terms.total), 0.5 * pa + 2.0 * kd + 1.5 * fr, 1e-12);
}

TEST_F(TotalLossTest, LiteralKdSignSubtracts) {
  LossConfig cfg;
  cfg.kd_sign = KdSign::kLiteral;
  cfg.fr_weight = 0.0;
  Tape tape({});
  const TotalLossTerms terms = compute(tape, cfg);
  EXPECT_NEAR(tape.value(terms.total),
              tape.value(terms.pa) - tape.value(*terms.kd), 1e-12);
}

TEST(LossGradients, AgreeWithCentralDifferences) {
  using testing::LossKind;
  for (LossKind kind : {LossKind::kPa, LossKind::kEvt, LossKind::kKd,
                        LossKind::kReplay, LossKind::kTotal}) {
    for (NegativeProxies neg :
         {NegativeProxies::kAbsentFromBatch, NegativeProxies::kAll}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const testing::GradientCheck check =
            testing::check_loss_gradient(kind, seed, neg);
        EXPECT_TRUE(check.ok())
            << testing::loss_kind_name(kind) << " seed " << seed << ": "
            << check.first_failure;
        EXPECT_GT(check.coordinates, 0u);
      }
    }
  }
}

}  // namespace
}  // namespace cgcd
