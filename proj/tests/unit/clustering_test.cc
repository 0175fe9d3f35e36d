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

#include "cgcd/clustering.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "support/oracles.h"

namespace cgcd {
namespace {

using testing::Vec;

struct Groups {
  RowMatrix points;
  std::vector<int> truth;
};

Groups make_groups(const std::vector<Vec>& centres, int per_group,
                   double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, spread);
  std::vector<Vec> rows;
  Groups out;
  for (std::size_t c = 0; c < centres.size(); ++c) {
    for (int i = 0; i < per_group; ++i) {
      Vec v = centres[c];
      for (double& x : v) x += g(rng);
      rows.push_back(testing::plain_normalize(v));
      out.truth.push_back(static_cast<int>(c));
    }
  }
  out.points = testing::rows_to_matrix(rows);
  return out;
}

std::vector<int> as_int(const std::vector<std::size_t>& v) {
  return std::vector<int>(v.begin(), v.end());
}

const std::vector<Vec> kAxes = {
    {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};

TEST(AffinityPropagation, SinglePoint) {
  const ClusterResult r =
      affinity_propagation(testing::rows_to_matrix({{1.0, 0.0}}), ApConfig{});
  EXPECT_EQ(r.cluster_count(), 1u);
  EXPECT_EQ(r.assignments, std::vector<std::size_t>{0});
  EXPECT_TRUE(r.converged);
}

TEST(AffinityPropagation, EmptyInputThrows) {
  EXPECT_THROW(affinity_propagation(RowMatrix(0, 3), ApConfig{}),
               std::invalid_argument);
}

TEST(AffinityPropagation, IdenticalPointsFormOneCluster) {
  const RowMatrix z = testing::rows_to_matrix(std::vector<Vec>(6, Vec{0.6, 0.8}));
  const ClusterResult r = affinity_propagation(z, ApConfig{});
  EXPECT_EQ(r.cluster_count(), 1u);
  for (std::size_t a : r.assignments) EXPECT_EQ(a, 0u);
}

TEST(AffinityPropagation, RecoversSeparatedGroups) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Groups g = make_groups(kAxes, 10, 0.02, seed);
    const ClusterResult r = affinity_propagation(g.points, ApConfig{});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.cluster_count(), 3u) << "seed " << seed;
    EXPECT_DOUBLE_EQ(testing::brute_force_accuracy(as_int(r.assignments), g.truth),
                     1.0);
  }
}

TEST(AffinityPropagation, ExemplarsBelongToTheirOwnClusters) {
  const Groups g = make_groups(kAxes, 8, 0.05, 4);
  const ClusterResult r = affinity_propagation(g.points, ApConfig{});
  ASSERT_EQ(r.assignments.size(), g.points.rows());
  std::set<std::size_t> distinct(r.exemplars.begin(), r.exemplars.end());
  EXPECT_EQ(distinct.size(), r.exemplars.size());
  for (std::size_t c = 0; c < r.exemplars.size(); ++c) {
    EXPECT_EQ(r.assignments[r.exemplars[c]], c);
  }
}

TEST(AffinityPropagation, PreferenceControlsClusterCount) {
  const Groups g = make_groups(kAxes, 5, 0.05, 2);
  ApConfig cfg;
  cfg.preference = 0.0;
  EXPECT_EQ(affinity_propagation(g.points, cfg).cluster_count(), 15u);
  cfg.preference = -100.0;
  EXPECT_EQ(affinity_propagation(g.points, cfg).cluster_count(), 1u);

  std::size_t previous = 15;
  for (double pref : {-1e-4, -1e-3, -1e-2, -0.1, -1.0, -10.0, -100.0}) {
    cfg.preference = pref;
    const std::size_t k = affinity_propagation(g.points, cfg).cluster_count();
    EXPECT_LE(k, previous) << "preference " << pref;
    previous = k;
  }
}

TEST(AffinityPropagation, Deterministic) {
  const Groups g = make_groups(kAxes, 10, 0.1, 9);
  const ClusterResult a = affinity_propagation(g.points, ApConfig{});
  const ClusterResult b = affinity_propagation(g.points, ApConfig{});
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.exemplars, b.exemplars);
}

TEST(ClusterCentroids, NormalizedMeans) {
  const RowMatrix z = testing::rows_to_matrix(
      {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}});
  ClusterResult r;
  r.assignments = {0, 0, 1};
  r.exemplars = {0, 2};
  const RowMatrix c = cluster_centroids(r, z);
  ASSERT_EQ(c.rows(), 2u);
  EXPECT_NEAR(c.row(0)[0], std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(c.row(0)[1], std::sqrt(0.5), 1e-15);
  EXPECT_EQ(c.row(1)[0], -1.0);
  EXPECT_EQ(c.row(1)[1], 0.0);
}

TEST(ClusterCentroids, MismatchThrows) {
  ClusterResult r;
  r.assignments = {0};
  r.exemplars = {0};
  EXPECT_THROW(cluster_centroids(r, RowMatrix(2, 2)), std::invalid_argument);
  r.assignments = {0, 3};
  EXPECT_THROW(cluster_centroids(r, RowMatrix(2, 2)), std::invalid_argument);
}

TEST(ApConfig, Validation) {
  EXPECT_NO_THROW(ApConfig{}.validate());
  ApConfig low;
  low.damping = 0.4;
  EXPECT_THROW(low.validate(), std::invalid_argument);
  ApConfig one;
  one.damping = 1.0;
  EXPECT_THROW(one.validate(), std::invalid_argument);
  ApConfig iters;
  iters.max_iterations = 0;
  EXPECT_THROW(iters.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace cgcd
