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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "cgcd/embedding.h"

namespace cgcd {

namespace {

constexpr double kJitterScale = 1e-9;

// Deterministic value in [0, 1) derived from the sample index.
double index_jitter(std::size_t i) {
  std::uint64_t z = static_cast<std::uint64_t>(i) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

struct ApRun {
  std::vector<std::size_t> exemplars;
  bool converged = false;
  int iterations = 0;
};

ApRun run_messages(const std::vector<double>& s, std::size_t n,
                   const ApConfig& cfg, double damping) {
  std::vector<double> r(n * n, 0.0);
  std::vector<double> a(n * n, 0.0);
  std::vector<double> col_pos(n);
  std::vector<std::size_t> current;
  std::vector<std::size_t> last_nonempty;
  int stable = 0;
  ApRun run;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    run.iterations = it;
    // Responsibilities.
    for (std::size_t i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      double second = best;
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double v = a[i * n + k] + s[i * n + k];
        if (v > best) {
          second = best;
          best = v;
          best_k = k;
        } else if (v > second) {
          second = v;
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double fresh = s[i * n + k] - (k == best_k ? second : best);
        double& cell = r[i * n + k];
        cell = damping * cell + (1.0 - damping) * fresh;
      }
    }
    // Availabilities.
    std::fill(col_pos.begin(), col_pos.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        if (i != k) col_pos[k] += std::max(0.0, r[i * n + k]);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        double fresh;
        if (i == k) {
          fresh = col_pos[k];
        } else {
          fresh = std::min(
              0.0, r[k * n + k] + col_pos[k] - std::max(0.0, r[i * n + k]));
        }
        double& cell = a[i * n + k];
        cell = damping * cell + (1.0 - damping) * fresh;
      }
    }

    std::vector<std::size_t> exemplars;
    for (std::size_t k = 0; k < n; ++k) {
      if (r[k * n + k] + a[k * n + k] > 0.0) exemplars.push_back(k);
    }
    if (!exemplars.empty()) last_nonempty = exemplars;
    if (exemplars == current && !exemplars.empty()) {
      ++stable;
    } else {
      stable = 1;
      current = std::move(exemplars);
    }
    if (stable >= cfg.convergence_window) {
      run.converged = true;
      break;
    }
  }

  if (!last_nonempty.empty()) {
    run.exemplars = std::move(last_nonempty);
  } else {
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (r[k * n + k] + a[k * n + k] > r[best * n + best] + a[best * n + best]) {
        best = k;
      }
    }
    run.exemplars = {best};
  }
  return run;
}

}  // namespace

void ApConfig::validate() const {
  if (!(damping >= 0.5 && damping < 1.0)) {
    throw std::invalid_argument("ap damping must be in [0.5, 1)");
  }
  if (max_iterations < 1) {
    throw std::invalid_argument("ap max_iterations must be >= 1");
  }
  if (convergence_window < 1) {
    throw std::invalid_argument("ap convergence_window must be >= 1");
  }
}

ClusterResult affinity_propagation(const RowMatrix& embeddings,
                                   const ApConfig& cfg) {
  cfg.validate();
  const std::size_t n = embeddings.rows();
  if (n == 0) {
    throw std::invalid_argument("affinity_propagation: no samples");
  }
  ClusterResult result;
  result.damping_used = cfg.damping;
  if (n == 1) {
    result.assignments = {0};
    result.exemplars = {0};
    result.converged = true;
    return result;
  }

  std::vector<double> s(n * n, 0.0);
  std::vector<double> off_diagonal;
  off_diagonal.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i == k) continue;
      double d2 = 0.0;
      const auto zi = embeddings.row(i);
      const auto zk = embeddings.row(k);
      for (std::size_t c = 0; c < zi.size(); ++c) {
        const double diff = zi[c] - zk[c];
        d2 += diff * diff;
      }
      s[i * n + k] = -d2;
      off_diagonal.push_back(-d2);
    }
  }
  const double pref =
      cfg.preference.has_value() ? *cfg.preference : median(off_diagonal);
  const double jitter_unit = kJitterScale * (pref != 0.0 ? std::abs(pref) : 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    s[i * n + i] = pref - jitter_unit * index_jitter(i);
  }

  ApRun run = run_messages(s, n, cfg, cfg.damping);
  if (!run.converged && cfg.damping < 0.95) {
    const double raised = std::min(0.95, cfg.damping + 0.05);
    result.damping_used = raised;
    run = run_messages(s, n, cfg, raised);
  }

  result.exemplars = run.exemplars;
  result.converged = run.converged;
  result.iterations_run = run.iterations;
  result.assignments.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best_cluster = 0;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < result.exemplars.size(); ++c) {
      const std::size_t e = result.exemplars[c];
      if (e == i) {
        best_cluster = c;
        break;
      }
      const double sim = s[i * n + e];
      if (sim > best_sim) {
        best_sim = sim;
        best_cluster = c;
      }
    }
    result.assignments[i] = best_cluster;
  }
  return result;
}

RowMatrix cluster_centroids(const ClusterResult& result,
                            const RowMatrix& embeddings) {
  if (result.assignments.size() != embeddings.rows()) {
    throw std::invalid_argument("cluster_centroids: assignment count mismatch");
  }
  const std::size_t k = result.cluster_count();
  const std::size_t d = embeddings.cols();
  std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    const std::size_t c = result.assignments[i];
    if (c >= k) {
      throw std::invalid_argument("cluster_centroids: invalid assignment");
    }
    const auto z = embeddings.row(i);
    for (std::size_t j = 0; j < d; ++j) sums[c][j] += z[j];
  }
  RowMatrix out(0, d);
  for (const auto& sum : sums) out.append_row(normalized(sum));
  return out;
}

}  // namespace cgcd
