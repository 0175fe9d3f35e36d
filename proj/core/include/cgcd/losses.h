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

#ifndef CGCD_LOSSES_H_
#define CGCD_LOSSES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cgcd/embedding.h"
#include "cgcd/evt.h"
#include "cgcd/matrix.h"
#include "cgcd/numerics/tape.h"

namespace cgcd {

// Which proxies count as negatives in the proxy-anchor and evt losses.
enum class NegativeProxies {
  // Proxies whose class is absent from the batch; every sample is a negative.
  kAbsentFromBatch,
  // Every proxy; negatives are the samples of other classes.
  kAll,
};

// Sign convention for the distillation term.
enum class KdSign {
  kPenalty,  // +mean drift, added to the minimized objective
  kLiteral,  // -mean drift
};

struct LossConfig {
  double alpha = 32.0;  // scale
  double delta = 0.1;   // margin
  double pa_weight = 1.0;
  double kd_weight = 1.0;
  double fr_weight = 1.0;
  NegativeProxies negatives = NegativeProxies::kAbsentFromBatch;
  KdSign kd_sign = KdSign::kPenalty;

  void validate() const;

  friend bool operator==(const LossConfig&, const LossConfig&) = default;
};

struct ReplayConfig {
  double sigma = 0.05;
  // Synthetic features per old proxy. 0 lets the trainer balance the count
  // against the per-class sample count of the current data.
  int samples_per_class = 0;

  void validate() const;

  friend bool operator==(const ReplayConfig&, const ReplayConfig&) = default;
};

struct LabeledBatch {
  RowMatrix embeddings;
  std::vector<int> labels;
};

// Proxies as tape nodes together with their class ids.
struct ProxyNodes {
  std::vector<numerics::Var> vectors;
  std::vector<int> classes;
};

ProxyNodes bind_proxies(numerics::Tape& tape, const ProxySet& proxies,
                        std::size_t offset);
ProxyNodes constant_proxies(numerics::Tape& tape, const ProxySet& proxies);

// Proxy-anchor loss with cosine similarity.
numerics::Var pa_loss(numerics::Tape& tape,
                      std::span<const numerics::Var> embeddings,
                      std::span<const int> labels, const ProxyNodes& proxies,
                      const LossConfig& cfg);

// PSI-based loss: log(1 + sum(1 - psi)) over positives and
// log(1 + sum(psi)) over negatives, distances 1 - cos. Weibull parameters
// are constants.
numerics::Var evt_loss(numerics::Tape& tape,
                       std::span<const numerics::Var> embeddings,
                       std::span<const int> labels, const ProxyNodes& proxies,
                       std::span<const WeibullParams> weibulls,
                       NegativeProxies negatives);

// Mean L2 distance between teacher and student embeddings (unsigned).
numerics::Var kd_loss(numerics::Tape& tape,
                      std::span<const numerics::Var> old_embeddings,
                      std::span<const numerics::Var> new_embeddings);

// Gaussian features around old proxies, renormalized to the unit sphere and
// labelled with the proxy's class. Deterministic in `seed`.
LabeledBatch sample_replay_features(std::span<const Proxy> old_proxies,
                                    const ReplayConfig& cfg,
                                    std::uint64_t seed);

// pa_loss of the sampled replay batch against `proxies`. The samples are
// constants, so only the proxies receive gradient.
numerics::Var feature_replay_loss(numerics::Tape& tape,
                                  std::span<const Proxy> old_proxies,
                                  const ReplayConfig& replay,
                                  const ProxyNodes& proxies,
                                  const LossConfig& cfg, std::uint64_t seed);

struct TotalLossTerms {
  numerics::Var total;
  numerics::Var pa;
  std::optional<numerics::Var> fr;
  std::optional<numerics::Var> kd;
};

struct TotalLossInputs {
  std::span<const numerics::Var> embeddings;
  std::span<const int> labels;
  const ProxyNodes* proxies = nullptr;
  // Distillation pairs; empty spans drop the term.
  std::span<const numerics::Var> kd_teacher;
  std::span<const numerics::Var> kd_student;
  // Replay centres; empty drops the term.
  std::span<const Proxy> replay_proxies;
  ReplayConfig replay;
  std::uint64_t replay_seed = 0;
};

// pa_weight * pa + fr_weight * fr + kd_weight * (+/-) kd.
TotalLossTerms total_loss(numerics::Tape& tape, const TotalLossInputs& in,
                          const LossConfig& cfg);

// Convenience evaluators on plain data (no gradient).
double pa_loss_value(const LabeledBatch& batch, const ProxySet& proxies,
                     const LossConfig& cfg);
double evt_loss_value(const LabeledBatch& batch, const ProxySet& proxies,
                      std::span<const WeibullParams> weibulls,
                      NegativeProxies negatives);
double kd_loss_value(const RowMatrix& old_embeddings,
                     const RowMatrix& new_embeddings);

}  // namespace cgcd

#endif  // CGCD_LOSSES_H_
