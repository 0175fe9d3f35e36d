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

#ifndef CGCD_CLUSTERING_H_
#define CGCD_CLUSTERING_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "cgcd/matrix.h"

namespace cgcd {

struct ApConfig {
  double damping = 0.9;
  // Diagonal preference; unset means the median off-diagonal similarity.
  std::optional<double> preference;
  int max_iterations = 1000;
  int convergence_window = 50;

  void validate() const;

  friend bool operator==(const ApConfig&, const ApConfig&) = default;
};

struct ClusterResult {
  std::vector<std::size_t> assignments;  // cluster index per sample
  std::vector<std::size_t> exemplars;    // sample index per cluster
  bool converged = false;
  int iterations_run = 0;
  double damping_used = 0.0;

  std::size_t cluster_count() const { return exemplars.size(); }
};

// Affinity propagation on s(i, k) = -|z_i - z_k|^2.
//
// Exemplars are the samples with r(k, k) + a(k, k) > 0; every other sample
// joins its most similar exemplar (lowest index on ties). Runs until the
// exemplar set is unchanged for `convergence_window` iterations or
// `max_iterations` is reached. A run that does not converge is retried once
// with damping raised by 0.05 (capped at 0.95).
ClusterResult affinity_propagation(const RowMatrix& embeddings,
                                   const ApConfig& cfg);

// Mean of each cluster's members, renormalized to the unit sphere.
RowMatrix cluster_centroids(const ClusterResult& result,
                            const RowMatrix& embeddings);

}  // namespace cgcd

#endif  // CGCD_CLUSTERING_H_
