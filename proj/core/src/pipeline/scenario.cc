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

#include "cgcd/pipeline/scenario.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "cgcd/embedding.h"

namespace cgcd {

namespace {

constexpr int kMaxMeanDraws = 10000;

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = gauss(rng);
  return normalized(v);
}

}  // namespace

std::set<int> ScenarioData::initial_classes() const {
  return {initial_labels.begin(), initial_labels.end()};
}

std::set<int> ScenarioData::seen_classes(std::size_t step) const {
  std::set<int> seen = initial_classes();
  for (std::size_t t = 0; t < step && t < step_truth.size(); ++t) {
    seen.insert(step_truth[t].begin(), step_truth[t].end());
  }
  return seen;
}

double min_mean_angle(const RowMatrix& class_means) {
  double best = M_PI;
  for (std::size_t i = 0; i < class_means.rows(); ++i) {
    for (std::size_t j = i + 1; j < class_means.rows(); ++j) {
      const double c = std::clamp(
          cosine_sim(class_means.row(i), class_means.row(j)), -1.0, 1.0);
      best = std::min(best, std::acos(c));
    }
  }
  return best;
}

SyntheticScenario generate_synthetic_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const int total = cfg.total_classes;
  const int initial = cfg.initial_class_count();
  if (initial < 1) {
    throw std::invalid_argument("scenario: no classes for the initial stage");
  }
  const int n = cfg.samples_per_class;
  const int n_eval =
      static_cast<int>(std::lround(cfg.eval_fraction * static_cast<double>(n)));
  const int n_train = n - n_eval;
  const int n_initial = static_cast<int>(
      std::lround(cfg.initial_data_fraction * static_cast<double>(n_train)));
  const int n_left = n_train - n_initial;
  if (n_eval < 1) throw std::invalid_argument("scenario: empty evaluation split");
  if (n_initial < 1) throw std::invalid_argument("scenario: empty initial split");
  if (cfg.steps > 0 && initial == total && n_left < cfg.steps) {
    throw std::invalid_argument("scenario: some continual step would be empty");
  }

  std::mt19937_64 rng(cfg.seed);
  const std::size_t dim = cfg.input_dim;

  SyntheticScenario out;
  out.initial_class_count = initial;
  out.class_means = RowMatrix(0, dim);
  for (int c = 0; c < total; ++c) {
    std::vector<double> mean;
    for (int draw = 0;; ++draw) {
      if (draw == kMaxMeanDraws) {
        throw std::invalid_argument(
            "scenario: cannot place class means below max_mean_cosine");
      }
      mean = random_unit(rng, dim);
      bool ok = true;
      for (std::size_t j = 0; j < out.class_means.rows() && ok; ++j) {
        ok = cosine_sim(mean, out.class_means.row(j)) < cfg.max_mean_cosine;
      }
      if (ok) break;
    }
    out.class_means.append_row(mean);
  }

  // Per-coordinate noise so that the RMS angle from the mean is the spread.
  const double sigma =
      cfg.cluster_spread / std::sqrt(static_cast<double>(dim - 1));
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw_sample = [&](int c) {
    std::vector<double> x(out.class_means.row(static_cast<std::size_t>(c)).begin(),
                          out.class_means.row(static_cast<std::size_t>(c)).end());
    for (double& v : x) v += sigma * gauss(rng);
    return normalized(x);
  };

  const std::size_t steps = static_cast<std::size_t>(cfg.steps);
  ScenarioData& data = out.data;
  data.initial_features = RowMatrix(0, dim);
  data.eval_features = RowMatrix(0, dim);
  std::vector<RowMatrix> step_rows(steps, RowMatrix(0, dim));
  std::vector<std::vector<int>> step_labels(steps);
  out.novel_classes_per_step.assign(steps, {});

  for (int c = 0; c < total; ++c) {
    const bool is_initial = c < initial;
    std::size_t novel_step = 0;
    if (!is_initial) {
      if (steps == 0) break;
      novel_step = static_cast<std::size_t>(c - initial) % steps;
      out.novel_classes_per_step[novel_step].push_back(c);
    }
    for (int s = 0; s < n; ++s) {
      const std::vector<double> x = draw_sample(c);
      if (s < n_eval) {
        data.eval_features.append_row(x);
        data.eval_labels.push_back(c);
      } else if (is_initial && s < n_eval + n_initial) {
        data.initial_features.append_row(x);
        data.initial_labels.push_back(c);
      } else if (steps > 0) {
        const std::size_t t =
            is_initial ? static_cast<std::size_t>(s - n_eval - n_initial) % steps
                       : novel_step;
        step_rows[t].append_row(x);
        step_labels[t].push_back(c);
      }
    }
  }

  for (std::size_t t = 0; t < steps; ++t) {
    if (step_rows[t].rows() == 0) {
      throw std::invalid_argument("scenario: continual step " +
                                  std::to_string(t + 1) + " has no samples");
    }
    std::vector<std::size_t> order(step_rows[t].rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    data.step_features.push_back(step_rows[t].select(order));
    std::vector<int> truth;
    truth.reserve(order.size());
    for (std::size_t i : order) truth.push_back(step_labels[t][i]);
    data.step_truth.push_back(std::move(truth));
  }
  return out;
}

}  // namespace cgcd
