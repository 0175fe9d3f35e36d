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

#ifndef CGCD_NUMERICS_OPTIMIZER_H_
#define CGCD_NUMERICS_OPTIMIZER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cgcd/numerics/tape.h"

namespace cgcd::numerics {

// AdamW state for one parameter vector. Owned by a single trainer.
struct OptimizerState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step_count = 0;
  double learning_rate = 1e-4;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_stability = 1e-8;

  static OptimizerState for_size(std::size_t n, double learning_rate,
                                 double weight_decay);
};

// One AdamW update with decoupled weight decay: the decay multiplies the
// parameters directly, then the bias-corrected Adam step is applied.
void adamw_step(ParamVector& params, std::span<const double> grads,
                OptimizerState& state);

// initial_lr * 0.5^floor(epoch / 5).
double lr_schedule(double initial_lr, int epoch);

}  // namespace cgcd::numerics

#endif  // CGCD_NUMERICS_OPTIMIZER_H_
