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

#ifndef CGCD_NUMERICS_TAPE_H_
#define CGCD_NUMERICS_TAPE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace cgcd::numerics {

// Flattened trainable parameters (model weights followed by proxy
// coordinates). Entries must stay finite.
using ParamVector = std::vector<double>;

// Handle to a node recorded on a Tape. Only meaningful for the tape that
// created it.
struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode differentiation over a closed set of vector primitives:
// affine maps, tanh/relu, L2 normalization, dot products, exp, log, sums,
// max over a finite set and constant powers, plus the linear glue ops
// (add, sub, scale, add_scalar).
//
// Every node's value is checked for finiteness when it is recorded; a NaN
// or Inf raises NonFiniteError naming the primitive. exp() clamps its
// argument to [-30, 30]; clamped entries receive zero gradient and are
// counted in clamp_count().
class Tape {
 public:
  static constexpr double kExpClamp = 30.0;
  static constexpr double kNormalizeFloor = 1e-12;

  // The tape differentiates with respect to `params`. The span must outlive
  // the tape.
  explicit Tape(std::span<const double> params);

  // Leaf bound to params[offset, offset + size).
  Var param(std::size_t offset, std::size_t size);
  Var constant(std::span<const double> values);
  Var constant(double value);

  // weight is a rows x cols row-major leaf, bias has rows entries, x has
  // cols entries. Returns weight * x + bias.
  Var affine(Var weight, Var bias, Var x, std::size_t rows, std::size_t cols);
  Var tanh(Var x);
  Var relu(Var x);
  // x / sqrt(|x|^2 + floor^2).
  Var l2_normalize(Var x);
  Var dot(Var a, Var b);
  Var exp(Var x);
  Var log(Var x);
  // Scalar sum of scalar nodes. An empty list yields the constant 0.
  Var sum(std::span<const Var> scalars);
  // Sum of the entries of one vector node.
  Var sum_entries(Var x);
  // Largest of the scalar nodes; gradient goes to the first maximizer.
  Var max(std::span<const Var> scalars);
  // Elementwise x^exponent for exponent > 0. Entries <= 0 map to 0 with zero
  // gradient.
  Var pow(Var x, double exponent);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var scale(Var x, double factor);
  Var add_scalar(Var x, double offset);

  std::span<const double> values(Var v) const;
  double value(Var v) const;
  std::size_t size(Var v) const;

  // Gradient of the scalar node `loss` with respect to the bound params.
  std::vector<double> gradient(Var loss) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t clamp_count() const { return clamp_count_; }

 private:
  enum class Op : std::uint8_t {
    kParam,
    kConstant,
    kAffine,
    kTanh,
    kRelu,
    kNormalize,
    kDot,
    kExp,
    kLog,
    kSum,
    kSumEntries,
    kMax,
    kPow,
    kAdd,
    kSub,
    kScale,
    kAddScalar,
  };

  struct Node {
    Op op;
    std::uint32_t offset;  // into values_
    std::uint32_t size;
    std::int32_t a = -1;
    std::int32_t b = -1;
    std::int32_t c = -1;
    std::uint32_t rows = 0;  // affine rows; list begin for sum/max
    std::uint32_t cols = 0;  // affine cols; list length for sum/max
    double aux = 0.0;        // exponent, factor, offset, norm or argmax
    std::size_t param_offset = 0;
  };

  static std::string_view op_name(Op op);

  Var push(Node node, std::span<const double> values);
  const Node& node(Var v) const;
  std::span<const double> node_values(const Node& n) const {
    return {values_.data() + n.offset, n.size};
  }

  std::span<const double> params_;
  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<std::int32_t> lists_;
  std::vector<std::uint8_t> clamped_;  // parallel to values_
  std::size_t clamp_count_ = 0;
};

struct LossAndGrad {
  double loss = 0.0;
  ParamVector grads;
};

// Builds a loss on a fresh tape bound to `params` and returns its value and
// gradient. Throws NonFiniteError if the loss is not finite.
LossAndGrad evaluate_with_grad(const std::function<Var(Tape&)>& build,
                               std::span<const double> params);

}  // namespace cgcd::numerics

#endif  // CGCD_NUMERICS_TAPE_H_
