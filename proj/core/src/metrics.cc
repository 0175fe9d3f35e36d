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

#include "cgcd/metrics.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cgcd/embedding.h"

namespace cgcd {

std::vector<std::size_t> solve_assignment(std::span<const double> cost,
                                          std::size_t n) {
  if (cost.size() != n * n) {
    throw std::invalid_argument("solve_assignment: cost is not n x n");
  }
  // Shortest augmenting path with row/column potentials; 1-based internals.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0);
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

ClusterMatching match_clusters(std::span<const int> predicted,
                               std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("hungarian_accuracy: length mismatch");
  }
  if (predicted.empty()) {
    throw std::invalid_argument("hungarian_accuracy: empty input");
  }
  std::vector<int> pred_ids(predicted.begin(), predicted.end());
  std::vector<int> true_ids(truth.begin(), truth.end());
  std::sort(pred_ids.begin(), pred_ids.end());
  pred_ids.erase(std::unique(pred_ids.begin(), pred_ids.end()), pred_ids.end());
  std::sort(true_ids.begin(), true_ids.end());
  true_ids.erase(std::unique(true_ids.begin(), true_ids.end()), true_ids.end());

  auto index_of = [](const std::vector<int>& ids, int v) {
    return static_cast<std::size_t>(
        std::lower_bound(ids.begin(), ids.end(), v) - ids.begin());
  };
  const std::size_t n = std::max(pred_ids.size(), true_ids.size());
  std::vector<double> counts(n * n, 0.0);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    counts[index_of(pred_ids, predicted[i]) * n +
           index_of(true_ids, truth[i])] += 1.0;
  }
  std::vector<double> cost(n * n);
  for (std::size_t c = 0; c < n * n; ++c) cost[c] = -counts[c];
  const std::vector<std::size_t> assign = solve_assignment(cost, n);

  ClusterMatching m;
  m.total = predicted.size();
  for (std::size_t r = 0; r < pred_ids.size(); ++r) {
    const std::size_t c = assign[r];
    if (c < true_ids.size()) {
      m.predicted_to_truth[pred_ids[r]] = true_ids[c];
      m.matched += static_cast<std::size_t>(counts[r * n + c]);
    }
  }
  return m;
}

double ClusterMatching::accuracy_on(std::span<const int> predicted,
                                    std::span<const int> truth,
                                    std::span<const bool> mask) const {
  if (predicted.size() != truth.size() || mask.size() != truth.size()) {
    throw std::invalid_argument("accuracy_on: length mismatch");
  }
  std::size_t hits = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!mask[i]) continue;
    ++count;
    const auto it = predicted_to_truth.find(predicted[i]);
    if (it != predicted_to_truth.end() && it->second == truth[i]) ++hits;
  }
  return count == 0 ? 0.0
                    : static_cast<double>(hits) / static_cast<double>(count);
}

double hungarian_accuracy(std::span<const int> predicted,
                          std::span<const int> truth) {
  return match_clusters(predicted, truth).accuracy();
}

double forgetting(std::span<const double> m_old_history) {
  if (m_old_history.empty()) {
    throw std::invalid_argument("forgetting: empty history");
  }
  if (m_old_history.size() == 1) return 0.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 1; t < m_old_history.size(); ++t) {
    worst = std::max(worst, m_old_history[0] - m_old_history[t]);
  }
  return worst;
}

double discovery(std::span<const double> m_new_history) {
  if (m_new_history.empty()) {
    throw std::invalid_argument("discovery: empty history");
  }
  const double sum =
      std::accumulate(m_new_history.begin(), m_new_history.end(), 0.0);
  return sum / static_cast<double>(m_new_history.size());
}

std::map<int, double> recall_at_k(const RowMatrix& embeddings,
                                  std::span<const int> labels,
                                  std::span<const int> ks) {
  const std::size_t n = embeddings.rows();
  if (labels.size() != n) {
    throw std::invalid_argument("recall_at_k: labels/embeddings mismatch");
  }
  if (n < 2) throw std::invalid_argument("recall_at_k: need >= 2 samples");
  int k_max = 0;
  for (int k : ks) {
    if (k < 1 || static_cast<std::size_t>(k) >= n) {
      throw std::invalid_argument("recall_at_k: K=" + std::to_string(k) +
                                  " must be in [1, dataset size)");
    }
    k_max = std::max(k_max, k);
  }
  // Rank of the first same-label neighbour for each query.
  std::vector<std::size_t> first_hit(n, n);
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(n - 1);
  for (std::size_t q = 0; q < n; ++q) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != q) {
        order.emplace_back(proxy_distance(embeddings.row(q), embeddings.row(j)),
                           j);
      }
    }
    const auto top = order.begin() + k_max;
    std::partial_sort(order.begin(), top, order.end());
    for (std::size_t r = 0; r < static_cast<std::size_t>(k_max); ++r) {
      if (labels[order[r].second] == labels[q]) {
        first_hit[q] = r;
        break;
      }
    }
  }
  std::map<int, double> out;
  for (int k : ks) {
    std::size_t hits = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (first_hit[q] < static_cast<std::size_t>(k)) ++hits;
    }
    out[k] = static_cast<double>(hits) / static_cast<double>(n);
  }
  return out;
}

}  // namespace cgcd
