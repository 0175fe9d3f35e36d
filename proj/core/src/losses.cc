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

#include "cgcd/losses.h"

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace cgcd {

using numerics::Tape;
using numerics::Var;

void LossConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  if (pa_weight < 0.0 || kd_weight < 0.0 || fr_weight < 0.0) {
    throw std::invalid_argument("loss weights must be >= 0");
  }
}

void ReplayConfig::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (samples_per_class < 0) {
    throw std::invalid_argument("samples_per_class must be >= 0");
  }
}

ProxyNodes bind_proxies(Tape& tape, const ProxySet& proxies,
                        std::size_t offset) {
  ProxyNodes nodes;
  const std::size_t d = proxies.dim();
  for (const Proxy& p : proxies.proxies) {
    nodes.vectors.push_back(tape.param(offset, d));
    nodes.classes.push_back(p.class_id);
    offset += d;
  }
  return nodes;
}

ProxyNodes constant_proxies(Tape& tape, const ProxySet& proxies) {
  ProxyNodes nodes;
  for (const Proxy& p : proxies.proxies) {
    nodes.vectors.push_back(tape.constant(p.vector));
    nodes.classes.push_back(p.class_id);
  }
  return nodes;
}

namespace {

void check_labels_have_proxies(std::span<const int> labels,
                               const ProxyNodes& proxies) {
  const std::set<int> known(proxies.classes.begin(), proxies.classes.end());
  for (int l : labels) {
    if (!known.contains(l)) {
      throw std::invalid_argument("batch label " + std::to_string(l) +
                                  " has no proxy");
    }
  }
}

// Which samples are positives / negatives of proxy i, and whether the proxy
// belongs to P+ and P-.
struct ProxyPartition {
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  bool in_positive_set = false;
  bool in_negative_set = false;
};

ProxyPartition partition_for(int proxy_class, std::span<const int> labels,
                             NegativeProxies mode) {
  ProxyPartition part;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] == proxy_class) {
      part.positives.push_back(j);
    } else {
      part.negatives.push_back(j);
    }
  }
  part.in_positive_set = !part.positives.empty();
  if (mode == NegativeProxies::kAll) {
    part.in_negative_set = true;
  } else {
    // Absent from the batch: every sample is a negative of this proxy.
    part.in_negative_set = part.positives.empty();
  }
  return part;
}

// log(1 + sum(terms)).
Var log1p_sum(Tape& tape, std::span<const Var> terms) {
  return tape.log(tape.add_scalar(tape.sum(terms), 1.0));
}

// log(1 + sum(exp(args))), shifted by m = max(0, args) so no exponent is
// positive. The gradient through m cancels analytically.
Var log1p_sum_exp(Tape& tape, std::span<const Var> args) {
  std::vector<Var> with_one(args.begin(), args.end());
  with_one.push_back(tape.constant(0.0));
  const Var shift = tape.max(with_one);
  const Var neg_shift = tape.scale(shift, -1.0);
  std::vector<Var> shifted;
  shifted.reserve(with_one.size());
  for (Var a : with_one) shifted.push_back(tape.exp(tape.add(a, neg_shift)));
  return tape.add(shift, tape.log(tape.sum(shifted)));
}

Var averaged(Tape& tape, std::span<const Var> terms, std::size_t count) {
  if (count == 0) return tape.constant(0.0);
  return tape.scale(tape.sum(terms), 1.0 / static_cast<double>(count));
}

}  // namespace

Var pa_loss(Tape& tape, std::span<const Var> embeddings,
            std::span<const int> labels, const ProxyNodes& proxies,
            const LossConfig& cfg) {
  if (embeddings.empty()) throw std::invalid_argument("pa_loss: empty batch");
  if (embeddings.size() != labels.size()) {
    throw std::invalid_argument("pa_loss: embeddings/labels mismatch");
  }
  check_labels_have_proxies(labels, proxies);

  std::vector<Var> pos_terms;
  std::vector<Var> neg_terms;
  std::size_t pos_count = 0;
  std::size_t neg_count = 0;
  std::vector<Var> inner;
  for (std::size_t i = 0; i < proxies.vectors.size(); ++i) {
    const ProxyPartition part =
        partition_for(proxies.classes[i], labels, cfg.negatives);
    if (part.in_positive_set) {
      ++pos_count;
      inner.clear();
      for (std::size_t j : part.positives) {
        const Var cos = tape.dot(embeddings[j], proxies.vectors[i]);
        inner.push_back(
            tape.scale(tape.add_scalar(cos, -cfg.delta), -cfg.alpha));
      }
      pos_terms.push_back(log1p_sum_exp(tape, inner));
    }
    if (part.in_negative_set) {
      ++neg_count;
      inner.clear();
      for (std::size_t j : part.negatives) {
        const Var cos = tape.dot(embeddings[j], proxies.vectors[i]);
        inner.push_back(tape.scale(tape.add_scalar(cos, cfg.delta), cfg.alpha));
      }
      neg_terms.push_back(log1p_sum_exp(tape, inner));
    }
  }
  return tape.add(averaged(tape, pos_terms, pos_count),
                  averaged(tape, neg_terms, neg_count));
}

Var evt_loss(Tape& tape, std::span<const Var> embeddings,
             std::span<const int> labels, const ProxyNodes& proxies,
             std::span<const WeibullParams> weibulls,
             NegativeProxies negatives) {
  if (embeddings.empty()) throw std::invalid_argument("evt_loss: empty batch");
  if (embeddings.size() != labels.size()) {
    throw std::invalid_argument("evt_loss: embeddings/labels mismatch");
  }
  if (weibulls.size() != proxies.vectors.size()) {
    throw std::invalid_argument("evt_loss: missing Weibull parameters");
  }
  check_labels_have_proxies(labels, proxies);

  auto psi_node = [&](Var z, std::size_t i) {
    const WeibullParams& w = weibulls[i];
    const Var dist =
        tape.add_scalar(tape.scale(tape.dot(z, proxies.vectors[i]), -1.0), 1.0);
    const Var ratio = tape.pow(tape.scale(dist, 1.0 / w.scale), w.shape);
    return tape.exp(tape.scale(ratio, -1.0));
  };

  std::vector<Var> pos_terms;
  std::vector<Var> neg_terms;
  std::size_t pos_count = 0;
  std::size_t neg_count = 0;
  std::vector<Var> inner;
  for (std::size_t i = 0; i < proxies.vectors.size(); ++i) {
    const ProxyPartition part =
        partition_for(proxies.classes[i], labels, negatives);
    if (part.in_positive_set) {
      ++pos_count;
      inner.clear();
      for (std::size_t j : part.positives) {
        inner.push_back(
            tape.add_scalar(tape.scale(psi_node(embeddings[j], i), -1.0), 1.0));
      }
      pos_terms.push_back(log1p_sum(tape, inner));
    }
    if (part.in_negative_set) {
      ++neg_count;
      inner.clear();
      for (std::size_t j : part.negatives) {
        inner.push_back(psi_node(embeddings[j], i));
      }
      neg_terms.push_back(log1p_sum(tape, inner));
    }
  }
  return tape.add(averaged(tape, pos_terms, pos_count),
                  averaged(tape, neg_terms, neg_count));
}

Var kd_loss(Tape& tape, std::span<const Var> old_embeddings,
            std::span<const Var> new_embeddings) {
  if (old_embeddings.size() != new_embeddings.size()) {
    throw std::invalid_argument("kd_loss: length mismatch");
  }
  if (old_embeddings.empty()) return tape.constant(0.0);
  std::vector<Var> norms;
  norms.reserve(old_embeddings.size());
  for (std::size_t i = 0; i < old_embeddings.size(); ++i) {
    const Var diff = tape.sub(old_embeddings[i], new_embeddings[i]);
    norms.push_back(tape.pow(tape.dot(diff, diff), 0.5));
  }
  return averaged(tape, norms, norms.size());
}

LabeledBatch sample_replay_features(std::span<const Proxy> old_proxies,
                                    const ReplayConfig& cfg,
                                    std::uint64_t seed) {
  if (cfg.samples_per_class < 1) {
    throw std::invalid_argument("sample_replay_features: samples_per_class < 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, cfg.sigma);
  LabeledBatch batch;
  std::vector<double> z;
  for (const Proxy& p : old_proxies) {
    for (int s = 0; s < cfg.samples_per_class; ++s) {
      z.assign(p.vector.begin(), p.vector.end());
      for (double& v : z) v += noise(rng);
      batch.embeddings.append_row(normalized(z));
      batch.labels.push_back(p.class_id);
    }
  }
  return batch;
}

Var feature_replay_loss(Tape& tape, std::span<const Proxy> old_proxies,
                        const ReplayConfig& replay, const ProxyNodes& proxies,
                        const LossConfig& cfg, std::uint64_t seed) {
  const LabeledBatch batch = sample_replay_features(old_proxies, replay, seed);
  if (batch.labels.empty()) return tape.constant(0.0);
  std::vector<Var> zs;
  zs.reserve(batch.labels.size());
  for (std::size_t i = 0; i < batch.embeddings.rows(); ++i) {
    zs.push_back(tape.constant(batch.embeddings.row(i)));
  }
  return pa_loss(tape, zs, batch.labels, proxies, cfg);
}

TotalLossTerms total_loss(Tape& tape, const TotalLossInputs& in,
                          const LossConfig& cfg) {
  if (in.proxies == nullptr) {
    throw std::invalid_argument("total_loss: proxies required");
  }
  TotalLossTerms terms;
  terms.pa = pa_loss(tape, in.embeddings, in.labels, *in.proxies, cfg);
  Var total = tape.scale(terms.pa, cfg.pa_weight);
  if (!in.replay_proxies.empty()) {
    terms.fr = feature_replay_loss(tape, in.replay_proxies, in.replay,
                                   *in.proxies, cfg, in.replay_seed);
    total = tape.add(total, tape.scale(*terms.fr, cfg.fr_weight));
  }
  if (!in.kd_student.empty()) {
    terms.kd = kd_loss(tape, in.kd_teacher, in.kd_student);
    const double sign = cfg.kd_sign == KdSign::kPenalty ? 1.0 : -1.0;
    total = tape.add(total, tape.scale(*terms.kd, sign * cfg.kd_weight));
  }
  terms.total = total;
  return terms;
}

namespace {

std::vector<Var> constant_rows(Tape& tape, const RowMatrix& m) {
  std::vector<Var> out;
  out.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out.push_back(tape.constant(m.row(i)));
  }
  return out;
}

}  // namespace

double pa_loss_value(const LabeledBatch& batch, const ProxySet& proxies,
                     const LossConfig& cfg) {
  Tape tape({});
  const auto zs = constant_rows(tape, batch.embeddings);
  const ProxyNodes p = constant_proxies(tape, proxies);
  return tape.value(pa_loss(tape, zs, batch.labels, p, cfg));
}

double evt_loss_value(const LabeledBatch& batch, const ProxySet& proxies,
                      std::span<const WeibullParams> weibulls,
                      NegativeProxies negatives) {
  Tape tape({});
  const auto zs = constant_rows(tape, batch.embeddings);
  const ProxyNodes p = constant_proxies(tape, proxies);
  return tape.value(evt_loss(tape, zs, batch.labels, p, weibulls, negatives));
}

double kd_loss_value(const RowMatrix& old_embeddings,
                     const RowMatrix& new_embeddings) {
  Tape tape({});
  const auto a = constant_rows(tape, old_embeddings);
  const auto b = constant_rows(tape, new_embeddings);
  return tape.value(kd_loss(tape, a, b));
}

}  // namespace cgcd
