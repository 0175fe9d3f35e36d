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

#ifndef CGCD_PIPELINE_CONFIG_H_
#define CGCD_PIPELINE_CONFIG_H_

#include <cstdint>
#include <vector>

#include "cgcd/clustering.h"
#include "cgcd/embedding.h"
#include "cgcd/evt.h"
#include "cgcd/losses.h"

namespace cgcd {

struct TrainConfig {
  int epochs_pa = 60;
  int epochs_evt = 60;
  int epochs_continual = 10;
  int batch_size = 64;
  double learning_rate = 1e-4;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
  // Adds the evt loss (with Weibulls fitted at the start of the step) to the
  // continual objective. Off by default.
  bool evt_in_continual = false;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct ModelConfig {
  std::vector<std::size_t> hidden_dims = {64};
  std::size_t embedding_dim = 16;
  Activation activation = Activation::kTanh;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct ScenarioConfig {
  int total_classes = 13;
  double initial_class_fraction = 0.8;
  double initial_data_fraction = 0.8;
  double eval_fraction = 0.2;
  int steps = 1;
  int samples_per_class = 100;
  double cluster_spread = 0.1;  // RMS angle (radians) around a class mean
  std::size_t input_dim = 32;
  // Class means are redrawn until every pair has cosine below this.
  double max_mean_cosine = 0.5;
  std::uint64_t seed = 0;
  std::vector<int> recall_ks = {1, 2, 4, 8};

  ModelConfig model;
  EvtConfig evt;
  LossConfig loss;
  ReplayConfig replay;
  TrainConfig train;
  ApConfig ap;

  void validate() const;
  // Number of classes seen in the initial stage.
  int initial_class_count() const;
  std::vector<std::size_t> layer_dims() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

}  // namespace cgcd

#endif  // CGCD_PIPELINE_CONFIG_H_
