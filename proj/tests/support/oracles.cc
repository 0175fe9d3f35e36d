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

#include "support/oracles.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace cgcd::testing {

std::vector<double> central_differences(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = f(point);
    point[i] = saved - h;
    const double down = f(point);
    point[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

GradientCheck compare_gradients(std::span<const double> analytic,
                                std::span<const double> numeric,
                                double rel_tol, double abs_tol) {
  GradientCheck out;
  out.coordinates = analytic.size();
  if (analytic.size() != numeric.size()) {
    out.failures = 1;
    out.first_failure = "length mismatch";
    return out;
  }
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i];
    const double n = numeric[i];
    const double diff = std::abs(a - n);
    const double mag = std::max(std::abs(a), std::abs(n));
    if (mag >= 1e-6) {
      out.max_relative_error = std::max(out.max_relative_error, diff / mag);
    }
    if (diff <= rel_tol * mag || diff <= abs_tol) continue;
    if (out.failures++ == 0) {
      std::ostringstream ss;
      ss.precision(12);
      ss << "coordinate " << i << ": analytic " << a << " numeric " << n;
      out.first_failure = ss.str();
    }
  }
  return out;
}

double literal_pa_loss(const std::vector<Vec>& z, const std::vector<int>& labels,
                       const std::vector<Vec>& proxies,
                       const std::vector<int>& proxy_classes, double alpha,
                       double delta, bool all_negatives) {
  const std::set<int> present(labels.begin(), labels.end());
  double pos_sum = 0.0;
  double neg_sum = 0.0;
  int pos_count = 0;
  int neg_count = 0;
  for (std::size_t p = 0; p < proxies.size(); ++p) {
    const bool positive = present.contains(proxy_classes[p]);
    if (positive) {
      double s = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) {
        if (labels[j] == proxy_classes[p]) {
          s += std::exp(-alpha * (plain_dot(z[j], proxies[p]) - delta));
        }
      }
      pos_sum += std::log(1.0 + s);
      ++pos_count;
    }
    if (all_negatives || !positive) {
      double s = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) {
        if (labels[j] != proxy_classes[p]) {
          s += std::exp(alpha * (plain_dot(z[j], proxies[p]) + delta));
        }
      }
      neg_sum += std::log(1.0 + s);
      ++neg_count;
    }
  }
  return (pos_count ? pos_sum / pos_count : 0.0) +
         (neg_count ? neg_sum / neg_count : 0.0);
}

double literal_evt_loss(const std::vector<Vec>& z, const std::vector<int>& labels,
                        const std::vector<Vec>& proxies,
                        const std::vector<int>& proxy_classes,
                        const std::vector<ShapeScale>& weibulls,
                        bool all_negatives) {
  const std::set<int> present(labels.begin(), labels.end());
  auto inclusion = [&](const Vec& zj, std::size_t p) {
    const double d = 1.0 - plain_dot(zj, proxies[p]);
    return std::exp(-std::pow(std::max(d, 0.0) / weibulls[p].scale,
                              weibulls[p].shape));
  };
  double pos_sum = 0.0;
  double neg_sum = 0.0;
  int pos_count = 0;
  int neg_count = 0;
  for (std::size_t p = 0; p < proxies.size(); ++p) {
    const bool positive = present.contains(proxy_classes[p]);
    if (positive) {
      double s = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) {
        if (labels[j] == proxy_classes[p]) s += 1.0 - inclusion(z[j], p);
      }
      pos_sum += std::log(1.0 + s);
      ++pos_count;
    }
    if (all_negatives || !positive) {
      double s = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) {
        if (labels[j] != proxy_classes[p]) s += inclusion(z[j], p);
      }
      neg_sum += std::log(1.0 + s);
      ++neg_count;
    }
  }
  return (pos_count ? pos_sum / pos_count : 0.0) +
         (neg_count ? neg_sum / neg_count : 0.0);
}

double literal_kd_loss(const std::vector<Vec>& old_z,
                       const std::vector<Vec>& new_z) {
  if (old_z.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < old_z.size(); ++i) {
    double sq = 0.0;
    for (std::size_t k = 0; k < old_z[i].size(); ++k) {
      const double d = old_z[i][k] - new_z[i][k];
      sq += d * d;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(old_z.size());
}

double brute_force_accuracy(const std::vector<int>& predicted,
                            const std::vector<int>& truth) {
  std::vector<int> pred_ids(predicted.begin(), predicted.end());
  std::sort(pred_ids.begin(), pred_ids.end());
  pred_ids.erase(std::unique(pred_ids.begin(), pred_ids.end()), pred_ids.end());
  std::vector<int> truth_ids(truth.begin(), truth.end());
  std::sort(truth_ids.begin(), truth_ids.end());
  truth_ids.erase(std::unique(truth_ids.begin(), truth_ids.end()),
                  truth_ids.end());
  const std::size_t n = std::max(pred_ids.size(), truth_ids.size());
  // slot[k] = index into truth_ids (>= size means unmatched).
  std::vector<std::size_t> slot(n);
  std::iota(slot.begin(), slot.end(), std::size_t{0});
  std::size_t best = 0;
  do {
    std::size_t agree = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const std::size_t p = static_cast<std::size_t>(
          std::lower_bound(pred_ids.begin(), pred_ids.end(), predicted[i]) -
          pred_ids.begin());
      const std::size_t t = slot[p];
      if (t < truth_ids.size() && truth_ids[t] == truth[i]) ++agree;
    }
    best = std::max(best, agree);
  } while (std::next_permutation(slot.begin(), slot.end()));
  return static_cast<double>(best) / static_cast<double>(predicted.size());
}

std::size_t brute_force_min_cover(const CoverInstance& instance) {
  const std::size_t n = instance.universe.size();
  std::size_t best = n;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const std::size_t size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size >= best) continue;
    std::set<std::size_t> covered;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        covered.insert(instance.sets[i].begin(), instance.sets[i].end());
      }
    }
    bool all = true;
    for (std::size_t u : instance.universe) all = all && covered.contains(u);
    if (all) best = size;
  }
  return best;
}

double harmonic(std::size_t n) {
  double h = 0.0;
  for (std::size_t k = 1; k <= n; ++k) h += 1.0 / static_cast<double>(k);
  return h;
}

std::map<int, double> brute_force_recall(const RowMatrix& z,
                                         const std::vector<int>& labels,
                                         const std::vector<int>& ks) {
  const std::size_t n = z.rows();
  std::map<int, double> out;
  for (int k : ks) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<double, std::size_t>> order;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double dot = 0.0;
        for (std::size_t c = 0; c < z.cols(); ++c) dot += z.row(i)[c] * z.row(j)[c];
        order.emplace_back(1.0 - dot, j);
      }
      std::sort(order.begin(), order.end());
      bool hit = false;
      for (int r = 0; r < k; ++r) hit = hit || labels[order[r].second] == labels[i];
      hits += hit ? 1 : 0;
    }
    out[k] = static_cast<double>(hits) / static_cast<double>(n);
  }
  return out;
}

std::vector<double> weibull_samples(double shape, double scale, std::size_t n,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(n);
  for (double& x : out) {
    double v = u(rng);
    while (v <= 0.0) v = u(rng);
    x = scale * std::pow(-std::log(v), 1.0 / shape);
  }
  return out;
}

Vec random_unit(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (double& x : v) x = g(rng);
  return plain_normalize(v);
}

Vec unit_axis(std::size_t dim, std::size_t axis, double sign) {
  Vec v(dim, 0.0);
  v[axis] = sign;
  return v;
}

double plain_dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vec plain_normalize(const Vec& v) {
  const double n = std::sqrt(plain_dot(v, v));
  Vec out(v);
  for (double& x : out) x /= n;
  return out;
}

RowMatrix rows_to_matrix(const std::vector<Vec>& rows) {
  RowMatrix m;
  for (const Vec& r : rows) m.append_row(r);
  return m;
}

}  // namespace cgcd::testing
