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

#include "cgcd/numerics/tape.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cgcd/error.h"

namespace cgcd::numerics {

Tape::Tape(std::span<const double> params) : params_(params) {
  nodes_.reserve(1024);
  values_.reserve(1 << 14);
}

std::string_view Tape::op_name(Op op) {
  switch (op) {
    case Op::kParam: return "param";
    case Op::kConstant: return "constant";
    case Op::kAffine: return "affine";
    case Op::kTanh: return "tanh";
    case Op::kRelu: return "relu";
    case Op::kNormalize: return "l2_normalize";
    case Op::kDot: return "dot";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kSum: return "sum";
    case Op::kSumEntries: return "sum_entries";
    case Op::kMax: return "max";
    case Op::kPow: return "pow";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kScale: return "scale";
    case Op::kAddScalar: return "add_scalar";
  }
  return "unknown";
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw std::invalid_argument("Tape: invalid Var handle");
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

Var Tape::push(Node n, std::span<const double> vals) {
  for (double x : vals) {
    if (!std::isfinite(x)) throw NonFiniteError(std::string(op_name(n.op)));
  }
  n.offset = static_cast<std::uint32_t>(values_.size());
  n.size = static_cast<std::uint32_t>(vals.size());
  values_.insert(values_.end(), vals.begin(), vals.end());
  clamped_.resize(values_.size(), 0);
  nodes_.push_back(n);
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::param(std::size_t offset, std::size_t size) {
  if (offset + size > params_.size()) {
    throw std::out_of_range("Tape::param: slice exceeds parameter vector");
  }
  Node n{.op = Op::kParam};
  n.param_offset = offset;
  return push(n, params_.subspan(offset, size));
}

Var Tape::constant(std::span<const double> values) {
  return push(Node{.op = Op::kConstant}, values);
}

Var Tape::constant(double value) {
  return push(Node{.op = Op::kConstant}, std::span<const double>(&value, 1));
}

Var Tape::affine(Var weight, Var bias, Var x, std::size_t rows,
                 std::size_t cols) {
  const Node& w = node(weight);
  const Node& b = node(bias);
  const Node& in = node(x);
  if (w.size != rows * cols || b.size != rows || in.size != cols) {
    throw std::invalid_argument("Tape::affine: shape mismatch");
  }
  std::vector<double> out(rows);
  auto wv = node_values(w);
  auto bv = node_values(b);
  auto xv = node_values(in);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = bv[r];
    const double* wr = wv.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * xv[c];
    out[r] = acc;
  }
  Node n{.op = Op::kAffine, .a = weight.id, .b = bias.id, .c = x.id};
  n.rows = static_cast<std::uint32_t>(rows);
  n.cols = static_cast<std::uint32_t>(cols);
  return push(n, out);
}

Var Tape::tanh(Var x) {
  auto xv = node_values(node(x));
  std::vector<double> out(xv.size());
  std::transform(xv.begin(), xv.end(), out.begin(),
                 [](double v) { return std::tanh(v); });
  return push(Node{.op = Op::kTanh, .a = x.id}, out);
}

Var Tape::relu(Var x) {
  auto xv = node_values(node(x));
  std::vector<double> out(xv.size());
  std::transform(xv.begin(), xv.end(), out.begin(),
                 [](double v) { return v > 0.0 ? v : 0.0; });
  return push(Node{.op = Op::kRelu, .a = x.id}, out);
}

Var Tape::l2_normalize(Var x) {
  auto xv = node_values(node(x));
  double sq = 0.0;
  for (double v : xv) sq += v * v;
  const double denom = std::sqrt(sq + kNormalizeFloor * kNormalizeFloor);
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] / denom;
  Node n{.op = Op::kNormalize, .a = x.id};
  n.aux = denom;
  return push(n, out);
}

Var Tape::dot(Var a, Var b) {
  auto av = node_values(node(a));
  auto bv = node_values(node(b));
  if (av.size() != bv.size()) {
    throw std::invalid_argument("Tape::dot: size mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
  return push(Node{.op = Op::kDot, .a = a.id, .b = b.id},
              std::span<const double>(&acc, 1));
}

Var Tape::exp(Var x) {
  auto xv = node_values(node(x));
  std::vector<double> out(xv.size());
  std::vector<std::uint8_t> clamped(xv.size(), 0);
  for (std::size_t i = 0; i < xv.size(); ++i) {
    double arg = xv[i];
    if (arg > kExpClamp || arg < -kExpClamp) {
      arg = std::clamp(arg, -kExpClamp, kExpClamp);
      clamped[i] = 1;
      ++clamp_count_;
    }
    out[i] = std::exp(arg);
  }
  Var v = push(Node{.op = Op::kExp, .a = x.id}, out);
  std::copy(clamped.begin(), clamped.end(),
            clamped_.begin() + nodes_.back().offset);
  return v;
}

Var Tape::log(Var x) {
  auto xv = node_values(node(x));
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    if (!(xv[i] > 0.0)) throw NonFiniteError("log");
    out[i] = std::log(xv[i]);
  }
  return push(Node{.op = Op::kLog, .a = x.id}, out);
}

Var Tape::sum(std::span<const Var> scalars) {
  double acc = 0.0;
  Node n{.op = Op::kSum};
  n.rows = static_cast<std::uint32_t>(lists_.size());
  n.cols = static_cast<std::uint32_t>(scalars.size());
  for (Var s : scalars) {
    const Node& sn = node(s);
    if (sn.size != 1) throw std::invalid_argument("Tape::sum: non-scalar");
    acc += values_[sn.offset];
    lists_.push_back(s.id);
  }
  return push(n, std::span<const double>(&acc, 1));
}

Var Tape::sum_entries(Var x) {
  auto xv = node_values(node(x));
  double acc = 0.0;
  for (double v : xv) acc += v;
  return push(Node{.op = Op::kSumEntries, .a = x.id},
              std::span<const double>(&acc, 1));
}

Var Tape::max(std::span<const Var> scalars) {
  if (scalars.empty()) throw std::invalid_argument("Tape::max: empty set");
  Node n{.op = Op::kMax};
  n.rows = static_cast<std::uint32_t>(lists_.size());
  n.cols = static_cast<std::uint32_t>(scalars.size());
  double best = 0.0;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    const Node& sn = node(scalars[i]);
    if (sn.size != 1) throw std::invalid_argument("Tape::max: non-scalar");
    const double v = values_[sn.offset];
    if (i == 0 || v > best) {
      best = v;
      best_idx = i;
    }
    lists_.push_back(scalars[i].id);
  }
  n.aux = static_cast<double>(best_idx);
  return push(n, std::span<const double>(&best, 1));
}

Var Tape::pow(Var x, double exponent) {
  if (!(exponent > 0.0)) {
    throw std::invalid_argument("Tape::pow: exponent must be positive");
  }
  auto xv = node_values(node(x));
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out[i] = xv[i] > 0.0 ? std::pow(xv[i], exponent) : 0.0;
  }
  Node n{.op = Op::kPow, .a = x.id};
  n.aux = exponent;
  return push(n, out);
}

Var Tape::add(Var a, Var b) {
  auto av = node_values(node(a));
  auto bv = node_values(node(b));
  if (av.size() != bv.size()) throw std::invalid_argument("Tape::add: size");
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
  return push(Node{.op = Op::kAdd, .a = a.id, .b = b.id}, out);
}

Var Tape::sub(Var a, Var b) {
  auto av = node_values(node(a));
  auto bv = node_values(node(b));
  if (av.size() != bv.size()) throw std::invalid_argument("Tape::sub: size");
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[i];
  return push(Node{.op = Op::kSub, .a = a.id, .b = b.id}, out);
}

Var Tape::scale(Var x, double factor) {
  auto xv = node_values(node(x));
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * factor;
  Node n{.op = Op::kScale, .a = x.id};
  n.aux = factor;
  return push(n, out);
}

Var Tape::add_scalar(Var x, double offset) {
  auto xv = node_values(node(x));
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] + offset;
  Node n{.op = Op::kAddScalar, .a = x.id};
  n.aux = offset;
  return push(n, out);
}

std::span<const double> Tape::values(Var v) const {
  return node_values(node(v));
}

double Tape::value(Var v) const {
  const Node& n = node(v);
  if (n.size != 1) throw std::invalid_argument("Tape::value: non-scalar");
  return values_[n.offset];
}

std::size_t Tape::size(Var v) const { return node(v).size; }

std::vector<double> Tape::gradient(Var loss) const {
  const Node& root = node(loss);
  if (root.size != 1) {
    throw std::invalid_argument("Tape::gradient: loss must be scalar");
  }
  std::vector<double> g(values_.size(), 0.0);
  std::vector<double> out(params_.size(), 0.0);
  g[root.offset] = 1.0;

  for (std::int32_t id = loss.id; id >= 0; --id) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    const double* gy = g.data() + n.offset;
    const double* y = values_.data() + n.offset;
    const std::size_t m = n.size;
    auto grad_of = [&](std::int32_t in) {
      return g.data() + nodes_[static_cast<std::size_t>(in)].offset;
    };
    auto val_of = [&](std::int32_t in) {
      return values_.data() + nodes_[static_cast<std::size_t>(in)].offset;
    };
    switch (n.op) {
      case Op::kParam:
        for (std::size_t i = 0; i < m; ++i) out[n.param_offset + i] += gy[i];
        break;
      case Op::kConstant:
        break;
      case Op::kAffine: {
        const std::size_t rows = n.rows;
        const std::size_t cols = n.cols;
        const double* w = val_of(n.a);
        const double* x = val_of(n.c);
        double* gw = grad_of(n.a);
        double* gb = grad_of(n.b);
        double* gx = grad_of(n.c);
        for (std::size_t r = 0; r < rows; ++r) {
          const double gr = gy[r];
          if (gr == 0.0) continue;
          gb[r] += gr;
          double* gwr = gw + r * cols;
          const double* wr = w + r * cols;
          for (std::size_t c = 0; c < cols; ++c) {
            gwr[c] += gr * x[c];
            gx[c] += gr * wr[c];
          }
        }
        break;
      }
      case Op::kTanh: {
        double* gx = grad_of(n.a);
        for (std::size_t i = 0; i < m; ++i) gx[i] += gy[i] * (1.0 - y[i] * y[i]);
        break;
      }
      case Op::kRelu: {
        double* gx = grad_of(n.a);
        const double* x = val_of(n.a);
        for (std::size_t i = 0; i < m; ++i) {
          if (x[i] > 0.0) gx[i] += gy[i];
        }
        break;
      }
      case Op::kNormalize: {
        // d(x/s) = (gy - y (y . gy)) / s
        double* gx = grad_of(n.a);
        double ydotg = 0.0;
        for (std::size_t i = 0; i < m; ++i) ydotg += y[i] * gy[i];
        for (std::size_t i = 0; i < m; ++i) {
          gx[i] += (gy[i] - y[i] * ydotg) / n.aux;
        }
        break;
      }
      case Op::kDot: {
        const std::size_t k = nodes_[static_cast<std::size_t>(n.a)].size;
        const double* a = val_of(n.a);
        const double* b = val_of(n.b);
        double* ga = grad_of(n.a);
        double* gb = grad_of(n.b);
        for (std::size_t i = 0; i < k; ++i) {
          ga[i] += gy[0] * b[i];
          gb[i] += gy[0] * a[i];
        }
        break;
      }
      case Op::kExp: {
        double* gx = grad_of(n.a);
        for (std::size_t i = 0; i < m; ++i) {
          if (!clamped_[n.offset + i]) gx[i] += gy[i] * y[i];
        }
        break;
      }
      case Op::kLog: {
        double* gx = grad_of(n.a);
        const double* x = val_of(n.a);
        for (std::size_t i = 0; i < m; ++i) gx[i] += gy[i] / x[i];
        break;
      }
      case Op::kSum:
        for (std::uint32_t i = 0; i < n.cols; ++i) {
          grad_of(lists_[n.rows + i])[0] += gy[0];
        }
        break;
      case Op::kSumEntries: {
        const std::size_t k = nodes_[static_cast<std::size_t>(n.a)].size;
        double* gx = grad_of(n.a);
        for (std::size_t i = 0; i < k; ++i) gx[i] += gy[0];
        break;
      }
      case Op::kMax: {
        const auto idx = static_cast<std::size_t>(n.aux);
        grad_of(lists_[n.rows + idx])[0] += gy[0];
        break;
      }
      case Op::kPow: {
        double* gx = grad_of(n.a);
        const double* x = val_of(n.a);
        for (std::size_t i = 0; i < m; ++i) {
          if (x[i] > 0.0) {
            gx[i] += gy[i] * n.aux * std::pow(x[i], n.aux - 1.0);
          }
        }
        break;
      }
      case Op::kAdd: {
        double* ga = grad_of(n.a);
        double* gb = grad_of(n.b);
        for (std::size_t i = 0; i < m; ++i) {
          ga[i] += gy[i];
          gb[i] += gy[i];
        }
        break;
      }
      case Op::kSub: {
        double* ga = grad_of(n.a);
        double* gb = grad_of(n.b);
        for (std::size_t i = 0; i < m; ++i) {
          ga[i] += gy[i];
          gb[i] -= gy[i];
        }
        break;
      }
      case Op::kScale: {
        double* gx = grad_of(n.a);
        for (std::size_t i = 0; i < m; ++i) gx[i] += gy[i] * n.aux;
        break;
      }
      case Op::kAddScalar: {
        double* gx = grad_of(n.a);
        for (std::size_t i = 0; i < m; ++i) gx[i] += gy[i];
        break;
      }
    }
  }
  for (double v : out) {
    if (!std::isfinite(v)) throw NonFiniteError("gradient");
  }
  return out;
}

LossAndGrad evaluate_with_grad(const std::function<Var(Tape&)>& build,
                               std::span<const double> params) {
  Tape tape(params);
  const Var loss = build(tape);
  LossAndGrad result;
  result.loss = tape.value(loss);
  result.grads = tape.gradient(loss);
  return result;
}

}  // namespace cgcd::numerics
