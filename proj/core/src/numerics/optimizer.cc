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

#include "cgcd/numerics/optimizer.h"

#include <cmath>
#include <stdexcept>

#include "cgcd/error.h"

namespace cgcd::numerics {

OptimizerState OptimizerState::for_size(std::size_t n, double learning_rate,
                                        double weight_decay) {
  OptimizerState s;
  s.first_moment.assign(n, 0.0);
  s.second_moment.assign(n, 0.0);
  s.learning_rate = learning_rate;
  s.weight_decay = weight_decay;
  return s;
}

void adamw_step(ParamVector& params, std::span<const double> grads,
                OptimizerState& state) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.first_moment.size() != n ||
      state.second_moment.size() != n) {
    throw std::invalid_argument("adamw_step: length mismatch");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) throw NonFiniteError("adamw_step gradient");
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double bias1 = 1.0 - std::pow(state.beta1, t);
  const double bias2 = 1.0 - std::pow(state.beta2, t);
  const double lr = state.learning_rate;
  const double decay = 1.0 - lr * state.weight_decay;
  for (std::size_t i = 0; i < n; ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * grads[i];
    v = state.beta2 * v + (1.0 - state.beta2) * grads[i] * grads[i];
    const double m_hat = m / bias1;
    const double v_hat = v / bias2;
    params[i] = params[i] * decay -
                lr * m_hat / (std::sqrt(v_hat) + state.eps_stability);
  }
}

double lr_schedule(double initial_lr, int epoch) {
  if (epoch < 0) throw std::invalid_argument("lr_schedule: negative epoch");
  return initial_lr * std::pow(0.5, epoch / 5);
}

}  // namespace cgcd::numerics
