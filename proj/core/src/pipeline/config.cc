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

#include "cgcd/pipeline/config.h"

#include <cmath>
#include <stdexcept>

namespace cgcd {

void TrainConfig::validate() const {
  if (epochs_pa < 1 || epochs_evt < 1 || epochs_continual < 1) {
    throw std::invalid_argument("epoch counts must be >= 1");
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be > 0");
  }
  if (weight_decay < 0.0) {
    throw std::invalid_argument("weight_decay must be >= 0");
  }
}

int ScenarioConfig::initial_class_count() const {
  return static_cast<int>(
      std::lround(initial_class_fraction * static_cast<double>(total_classes)));
}

std::vector<std::size_t> ScenarioConfig::layer_dims() const {
  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), model.hidden_dims.begin(), model.hidden_dims.end());
  dims.push_back(model.embedding_dim);
  return dims;
}

void ScenarioConfig::validate() const {
  if (total_classes < 2) throw std::invalid_argument("total_classes must be >= 2");
  auto in_open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_open_unit(initial_class_fraction) ||
      !in_open_unit(initial_data_fraction) || !in_open_unit(eval_fraction)) {
    throw std::invalid_argument("fractions must lie in (0, 1)");
  }
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (samples_per_class < 1) {
    throw std::invalid_argument("samples_per_class must be >= 1");
  }
  if (cluster_spread < 0.0) {
    throw std::invalid_argument("cluster_spread must be >= 0");
  }
  if (input_dim < 2) throw std::invalid_argument("input_dim must be >= 2");
  if (model.embedding_dim < 2) {
    throw std::invalid_argument("embedding_dim must be >= 2");
  }
  if (!(max_mean_cosine > -1.0 && max_mean_cosine <= 1.0)) {
    throw std::invalid_argument("max_mean_cosine must be in (-1, 1]");
  }
  for (int k : recall_ks) {
    if (k < 1) throw std::invalid_argument("recall_ks entries must be >= 1");
  }
  evt.validate();
  loss.validate();
  replay.validate();
  train.validate();
  ap.validate();
}

}  // namespace cgcd
