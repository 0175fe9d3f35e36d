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

#include "cgcd/embedding.h"

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace cgcd {

namespace {

constexpr double kFloorSq =
    numerics::Tape::kNormalizeFloor * numerics::Tape::kNormalizeFloor;

}  // namespace

std::string_view activation_name(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw std::invalid_argument("unknown activation: " + std::string(name));
}

std::size_t param_count_for(std::span<const std::size_t> layer_dims) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    n += layer_dims[l + 1] * layer_dims[l] + layer_dims[l + 1];
  }
  return n;
}

EmbeddingModel::EmbeddingModel(std::vector<std::size_t> layer_dims,
                               Activation activation,
                               std::vector<double> params)
    : layer_dims_(std::move(layer_dims)),
      activation_(activation),
      params_(std::move(params)) {
  if (layer_dims_.size() < 2) {
    throw std::invalid_argument("EmbeddingModel: need at least two dims");
  }
  for (std::size_t d : layer_dims_) {
    if (d == 0) throw std::invalid_argument("EmbeddingModel: zero dim");
  }
  if (params_.size() != param_count_for(layer_dims_)) {
    throw std::invalid_argument("EmbeddingModel: parameter count mismatch");
  }
}

EmbeddingModel EmbeddingModel::random(std::vector<std::size_t> layer_dims,
                                      Activation activation,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> params;
  params.reserve(param_count_for(layer_dims));
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t in = layer_dims[l];
    const std::size_t out = layer_dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < in * out; ++i) params.push_back(dist(rng));
    params.insert(params.end(), out, 0.0);
  }
  return EmbeddingModel(std::move(layer_dims), activation, std::move(params));
}

void EmbeddingModel::set_params(std::span<const double> params) {
  if (params.size() != params_.size()) {
    throw std::invalid_argument("EmbeddingModel::set_params: size mismatch");
  }
  params_.assign(params.begin(), params.end());
}

std::vector<double> EmbeddingModel::embed(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw std::invalid_argument("embed: input has dim " +
                                std::to_string(x.size()) + ", model expects " +
                                std::to_string(input_dim()));
  }
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  std::size_t offset = 0;
  const std::size_t layers = layer_dims_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = layer_dims_[l];
    const std::size_t out = layer_dims_[l + 1];
    const double* w = params_.data() + offset;
    const double* b = w + in * out;
    next.assign(out, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
      double acc = b[r];
      for (std::size_t c = 0; c < in; ++c) acc += w[r * in + c] * cur[c];
      if (l + 1 < layers) {
        acc = activation_ == Activation::kTanh ? std::tanh(acc)
                                               : (acc > 0.0 ? acc : 0.0);
      }
      next[r] = acc;
    }
    cur.swap(next);
    offset += in * out + out;
  }
  return normalized(cur);
}

RowMatrix EmbeddingModel::embed_all(const RowMatrix& xs) const {
  RowMatrix out(0, embedding_dim());
  for (std::size_t i = 0; i < xs.rows(); ++i) out.append_row(embed(xs.row(i)));
  return out;
}

EmbeddingModel::Leaves EmbeddingModel::bind(numerics::Tape& tape,
                                            std::size_t offset) const {
  Leaves leaves;
  for (std::size_t l = 0; l + 1 < layer_dims_.size(); ++l) {
    const std::size_t in = layer_dims_[l];
    const std::size_t out = layer_dims_[l + 1];
    leaves.weights.push_back(tape.param(offset, in * out));
    offset += in * out;
    leaves.biases.push_back(tape.param(offset, out));
    offset += out;
  }
  return leaves;
}

numerics::Var EmbeddingModel::embed(numerics::Tape& tape,
                                    const Leaves& leaves,
                                    std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw std::invalid_argument("embed: input dimension mismatch");
  }
  numerics::Var cur = tape.constant(x);
  const std::size_t layers = layer_dims_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    cur = tape.affine(leaves.weights[l], leaves.biases[l], cur,
                      layer_dims_[l + 1], layer_dims_[l]);
    if (l + 1 < layers) {
      cur = activation_ == Activation::kTanh ? tape.tanh(cur) : tape.relu(cur);
    }
  }
  return tape.l2_normalize(cur);
}

std::vector<double> normalized(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double denom = std::sqrt(sq + kFloorSq);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / denom;
  return out;
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine_sim: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double proxy_distance(std::span<const double> a, std::span<const double> b) {
  const double d = 1.0 - cosine_sim(a, b);
  return d < 0.0 ? 0.0 : d;
}

std::vector<int> ProxySet::class_ids() const {
  std::vector<int> ids;
  ids.reserve(proxies.size());
  for (const Proxy& p : proxies) ids.push_back(p.class_id);
  return ids;
}

void ProxySet::validate() const {
  std::set<int> seen;
  const std::size_t d = dim();
  for (const Proxy& p : proxies) {
    if (p.vector.size() != d) {
      throw std::invalid_argument("ProxySet: inconsistent proxy dimension");
    }
    if (p.class_id < 0 || p.class_id >= class_count) {
      throw std::invalid_argument("ProxySet: class id " +
                                  std::to_string(p.class_id) +
                                  " outside [0, class_count)");
    }
    seen.insert(p.class_id);
  }
  if (static_cast<int>(seen.size()) != class_count) {
    throw std::invalid_argument("ProxySet: some class has no proxy");
  }
}

void ProxySet::renormalize() {
  for (Proxy& p : proxies) p.vector = normalized(p.vector);
}

std::vector<double> ProxySet::flatten() const {
  std::vector<double> flat;
  flat.reserve(size() * dim());
  for (const Proxy& p : proxies) {
    flat.insert(flat.end(), p.vector.begin(), p.vector.end());
  }
  return flat;
}

void ProxySet::assign_from(std::span<const double> flat) {
  const std::size_t d = dim();
  if (flat.size() != size() * d) {
    throw std::invalid_argument("ProxySet::assign_from: size mismatch");
  }
  for (std::size_t i = 0; i < proxies.size(); ++i) {
    auto src = flat.subspan(i * d, d);
    proxies[i].vector.assign(src.begin(), src.end());
  }
}

}  // namespace cgcd
