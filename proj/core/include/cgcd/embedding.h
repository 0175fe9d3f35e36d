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

#ifndef CGCD_EMBEDDING_H_
#define CGCD_EMBEDDING_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cgcd/matrix.h"
#include "cgcd/numerics/tape.h"

namespace cgcd {

enum class Activation { kTanh, kRelu };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

// Multilayer perceptron followed by L2 normalization. Every layer but the
// last applies the activation. Parameters are stored flat, layer by layer:
// weight (out x in, row-major) then bias (out).
class EmbeddingModel {
 public:
  EmbeddingModel(std::vector<std::size_t> layer_dims, Activation activation,
                 std::vector<double> params);

  // Glorot-uniform weights, zero biases.
  static EmbeddingModel random(std::vector<std::size_t> layer_dims,
                               Activation activation, std::uint64_t seed);

  const std::vector<std::size_t>& layer_dims() const { return layer_dims_; }
  Activation activation() const { return activation_; }
  std::size_t input_dim() const { return layer_dims_.front(); }
  std::size_t embedding_dim() const { return layer_dims_.back(); }
  std::size_t param_count() const { return params_.size(); }

  const std::vector<double>& params() const { return params_; }
  // Replaces the parameters; size must match.
  void set_params(std::span<const double> params);

  std::vector<double> embed(std::span<const double> x) const;
  RowMatrix embed_all(const RowMatrix& xs) const;

  // Parameter leaves of this model on a tape, starting at `offset` in the
  // tape's parameter vector.
  struct Leaves {
    std::vector<numerics::Var> weights;
    std::vector<numerics::Var> biases;
  };
  Leaves bind(numerics::Tape& tape, std::size_t offset) const;

  // Differentiable embed of a constant input through bound leaves.
  numerics::Var embed(numerics::Tape& tape, const Leaves& leaves,
                      std::span<const double> x) const;

  friend bool operator==(const EmbeddingModel&,
                         const EmbeddingModel&) = default;

 private:
  std::vector<std::size_t> layer_dims_;
  Activation activation_;
  std::vector<double> params_;
};

std::size_t param_count_for(std::span<const std::size_t> layer_dims);

// Returns v / sqrt(|v|^2 + 1e-24), the same floor the tape uses.
std::vector<double> normalized(std::span<const double> v);

double cosine_sim(std::span<const double> a, std::span<const double> b);

// 1 - cosine_sim; in [0, 2] for unit vectors.
double proxy_distance(std::span<const double> a, std::span<const double> b);

struct Proxy {
  std::vector<double> vector;
  int class_id = 0;
  // 0 for the initial stage, t for a proxy discovered at continual step t.
  int origin_step = 0;

  friend bool operator==(const Proxy&, const Proxy&) = default;
};

struct ProxySet {
  std::vector<Proxy> proxies;
  int class_count = 0;

  std::size_t size() const { return proxies.size(); }
  std::size_t dim() const {
    return proxies.empty() ? 0 : proxies.front().vector.size();
  }
  std::vector<int> class_ids() const;

  // Throws unless every class in [0, class_count) has a proxy and all
  // vectors share one dimension.
  void validate() const;
  void renormalize();

  // Proxy coordinates concatenated in order.
  std::vector<double> flatten() const;
  // Overwrites coordinates from a flat span (same layout as flatten()).
  void assign_from(std::span<const double> flat);

  friend bool operator==(const ProxySet&, const ProxySet&) = default;
};

}  // namespace cgcd

#endif  // CGCD_EMBEDDING_H_
