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

#ifndef CGCD_EVT_H_
#define CGCD_EVT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "cgcd/embedding.h"
#include "cgcd/matrix.h"

namespace cgcd {

// Two-parameter Weibull fitted to the nearest opposite-class distances of
// one proxy.
struct WeibullParams {
  static constexpr double kMinShape = 0.05;
  static constexpr double kMaxShape = 100.0;

  double shape = 1.0;  // kappa
  double scale = 1.0;  // lambda
  int tail_size_used = 0;

  friend bool operator==(const WeibullParams&, const WeibullParams&) = default;
};

struct EvtConfig {
  int tail_size = 500;           // tau
  double reject_threshold = 0.75;  // epsilon
  double cover_threshold = 0.999;  // zeta

  void validate() const;

  friend bool operator==(const EvtConfig&, const EvtConfig&) = default;
};

struct TailDistances {
  std::vector<double> distances;  // ascending
  bool capped = false;            // fewer opposite samples than tau
};

// The min(tau, available) smallest proxy distances from `proxy` to samples
// whose label differs from `proxy_class`, ascending.
TailDistances tail_distances(std::span<const double> proxy, int proxy_class,
                             const RowMatrix& embeddings,
                             std::span<const int> labels, int tau);

// Maximum-likelihood Weibull fit. Values below 1e-8 are floored; the shape
// is clamped to [0.05, 100].
WeibullParams fit_weibull(std::span<const double> tail);

// exp(-(d / scale)^shape).
double psi_at_distance(double distance, const WeibullParams& w);
double psi(std::span<const double> proxy, std::span<const double> z,
           const WeibullParams& w);

// One Weibull per proxy, fitted on the labelled embeddings.
std::vector<WeibullParams> fit_proxy_weibulls(const ProxySet& proxies,
                                              const RowMatrix& embeddings,
                                              std::span<const int> labels,
                                              int tau);

class PsiClassifier {
 public:
  static constexpr int kUnknown = -1;

  PsiClassifier(ProxySet proxies, std::vector<WeibullParams> weibulls,
                double reject_threshold);

  const ProxySet& proxies() const { return proxies_; }
  const std::vector<WeibullParams>& weibulls() const { return weibulls_; }
  int class_count() const { return proxies_.class_count; }
  double reject_threshold() const { return reject_threshold_; }

  // Per-class max of psi over that class's proxies.
  std::vector<double> class_posterior(std::span<const double> z) const;

  // Most probable class if its posterior is >= the threshold, else
  // kUnknown. Ties go to the lowest class id.
  int classify(std::span<const double> z) const;

 private:
  ProxySet proxies_;
  std::vector<WeibullParams> weibulls_;
  double reject_threshold_;
};

struct KnownUnknownSplit {
  std::vector<std::size_t> known;     // sample indices
  std::vector<int> pseudo_labels;     // parallel to known
  std::vector<std::size_t> unknown;   // sample indices
};

KnownUnknownSplit split_known_unknown(const RowMatrix& embeddings,
                                      const PsiClassifier& classifier);

}  // namespace cgcd

#endif  // CGCD_EVT_H_
