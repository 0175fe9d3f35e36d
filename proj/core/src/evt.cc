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

#include "cgcd/evt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cgcd/error.h"

namespace cgcd {

namespace {

constexpr double kTailFloor = 1e-8;
constexpr double kResidualTolerance = 1e-10;

// Likelihood-equation residual for the shape, on max-normalized data x:
//   sum(x^k ln x) / sum(x^k) - 1/k - mean(ln x)
// and its derivative in k. Both are scale invariant.
struct ShapeEquation {
  std::vector<double> log_x;
  double mean_log = 0.0;

  double residual(double k) const {
    double s0 = 0.0;
    double s1 = 0.0;
    for (double l : log_x) {
      const double w = std::exp(k * l);
      s0 += w;
      s1 += w * l;
    }
    return s1 / s0 - 1.0 / k - mean_log;
  }

  double derivative(double k) const {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (double l : log_x) {
      const double w = std::exp(k * l);
      s0 += w;
      s1 += w * l;
      s2 += w * l * l;
    }
    const double a = s1 / s0;
    return s2 / s0 - a * a + 1.0 / (k * k);
  }
};

}  // namespace

void EvtConfig::validate() const {
  if (tail_size < 2) throw std::invalid_argument("tail_size must be >= 2");
  if (!(reject_threshold > 0.0 && reject_threshold < 1.0)) {
    throw std::invalid_argument("reject_threshold must be in (0, 1)");
  }
  if (!(cover_threshold > 0.0 && cover_threshold < 1.0)) {
    throw std::invalid_argument("cover_threshold must be in (0, 1)");
  }
}

TailDistances tail_distances(std::span<const double> proxy, int proxy_class,
                             const RowMatrix& embeddings,
                             std::span<const int> labels, int tau) {
  if (labels.size() != embeddings.rows()) {
    throw std::invalid_argument("tail_distances: labels/embeddings mismatch");
  }
  if (tau < 1) throw std::invalid_argument("tail_distances: tau must be >= 1");
  std::vector<double> d;
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    if (labels[i] != proxy_class) {
      d.push_back(proxy_distance(proxy, embeddings.row(i)));
    }
  }
  if (d.empty()) {
    throw std::invalid_argument(
        "tail_distances: no opposite-class samples for class " +
        std::to_string(proxy_class));
  }
  TailDistances out;
  const auto want = static_cast<std::size_t>(tau);
  out.capped = d.size() < want;
  const std::size_t keep = std::min(want, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(keep),
                    d.end());
  d.resize(keep);
  out.distances = std::move(d);
  return out;
}

WeibullParams fit_weibull(std::span<const double> tail) {
  if (tail.size() < 2) {
    throw std::invalid_argument("fit_weibull: need at least 2 values");
  }
  std::vector<double> m(tail.begin(), tail.end());
  for (double& v : m) {
    if (!std::isfinite(v)) throw NonFiniteError("fit_weibull input");
    v = std::max(v, kTailFloor);
  }
  const auto [min_it, max_it] = std::minmax_element(m.begin(), m.end());
  const double hi_value = *max_it;
  if (hi_value - *min_it <= 1e-12 * hi_value) throw DegenerateTailError();

  ShapeEquation eq;
  eq.log_x.reserve(m.size());
  for (double v : m) eq.log_x.push_back(std::log(v / hi_value));
  double sum_log = 0.0;
  for (double l : eq.log_x) sum_log += l;
  eq.mean_log = sum_log / static_cast<double>(m.size());

  double lo = WeibullParams::kMinShape;
  double hi = WeibullParams::kMaxShape;
  double k;
  if (eq.residual(lo) >= 0.0) {
    k = lo;
  } else if (eq.residual(hi) <= 0.0) {
    k = hi;
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-6 * lo; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (eq.residual(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    k = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
      const double r = eq.residual(k);
      if (std::abs(r) < kResidualTolerance) break;
      double next = k - r / eq.derivative(k);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (r < 0.0) {
        lo = k;
      } else {
        hi = k;
      }
      k = next;
    }
  }

  double mean_pow = 0.0;
  for (double l : eq.log_x) mean_pow += std::exp(k * l);
  mean_pow /= static_cast<double>(m.size());
  WeibullParams w;
  w.shape = k;
  w.scale = hi_value * std::pow(mean_pow, 1.0 / k);
  w.tail_size_used = static_cast<int>(m.size());
  if (!std::isfinite(w.scale) || !(w.scale > 0.0)) {
    throw NonFiniteError("fit_weibull scale");
  }
  return w;
}

double psi_at_distance(double distance, const WeibullParams& w) {
  const double d = distance > 0.0 ? distance : 0.0;
  return std::exp(-std::pow(d / w.scale, w.shape));
}

double psi(std::span<const double> proxy, std::span<const double> z,
           const WeibullParams& w) {
  return psi_at_distance(proxy_distance(proxy, z), w);
}

std::vector<WeibullParams> fit_proxy_weibulls(const ProxySet& proxies,
                                              const RowMatrix& embeddings,
                                              std::span<const int> labels,
                                              int tau) {
  std::vector<WeibullParams> out;
  out.reserve(proxies.size());
  for (const Proxy& p : proxies.proxies) {
    const TailDistances tail =
        tail_distances(p.vector, p.class_id, embeddings, labels, tau);
    out.push_back(fit_weibull(tail.distances));
  }
  return out;
}

PsiClassifier::PsiClassifier(ProxySet proxies,
                             std::vector<WeibullParams> weibulls,
                             double reject_threshold)
    : proxies_(std::move(proxies)),
      weibulls_(std::move(weibulls)),
      reject_threshold_(reject_threshold) {
  if (proxies_.proxies.empty()) {
    throw std::invalid_argument("PsiClassifier: no proxies");
  }
  if (weibulls_.size() != proxies_.size()) {
    throw std::invalid_argument("PsiClassifier: one Weibull per proxy required");
  }
  proxies_.validate();
}

std::vector<double> PsiClassifier::class_posterior(
    std::span<const double> z) const {
  std::vector<double> post(static_cast<std::size_t>(class_count()), 0.0);
  for (std::size_t i = 0; i < proxies_.size(); ++i) {
    const Proxy& p = proxies_.proxies[i];
    const double v = psi(p.vector, z, weibulls_[i]);
    double& slot = post[static_cast<std::size_t>(p.class_id)];
    slot = std::max(slot, v);
  }
  return post;
}

int PsiClassifier::classify(std::span<const double> z) const {
  const std::vector<double> post = class_posterior(z);
  int best = 0;
  for (int l = 1; l < static_cast<int>(post.size()); ++l) {
    if (post[static_cast<std::size_t>(l)] >
        post[static_cast<std::size_t>(best)]) {
      best = l;
    }
  }
  return post[static_cast<std::size_t>(best)] >= reject_threshold_ ? best
                                                                   : kUnknown;
}

KnownUnknownSplit split_known_unknown(const RowMatrix& embeddings,
                                      const PsiClassifier& classifier) {
  KnownUnknownSplit split;
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    const int label = classifier.classify(embeddings.row(i));
    if (label == PsiClassifier::kUnknown) {
      split.unknown.push_back(i);
    } else {
      split.known.push_back(i);
      split.pseudo_labels.push_back(label);
    }
  }
  return split;
}

}  // namespace cgcd
