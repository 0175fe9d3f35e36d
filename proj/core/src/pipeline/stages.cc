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

#include "cgcd/pipeline/stages.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

#include "cgcd/clustering.h"
#include "cgcd/error.h"
#include "cgcd/losses.h"
#include "cgcd/numerics/optimizer.h"
#include "cgcd/numerics/tape.h"
#include "cgcd/reduction.h"

namespace cgcd {

using numerics::Tape;
using numerics::Var;

namespace {

constexpr int kFallbackReplaySamples = 20;

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
  std::uint64_t z = base;
  for (std::uint64_t v : {a, b, c}) {
    z += 0x9e3779b97f4a7c15ULL + v;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
  }
  return z;
}

struct BatchContext {
  Tape& tape;
  std::span<const std::size_t> indices;
  std::span<const Var> embeddings;  // parallel to indices
  const ProxyNodes& proxies;
  int epoch;
  std::size_t batch;
};

struct BatchTerms {
  Var total;
  std::optional<Var> pa;
  std::optional<Var> evt;
  std::optional<Var> fr;
  std::optional<Var> kd;
};

using BatchLossFn = std::function<BatchTerms(BatchContext&)>;

std::vector<double> gather_params(const EmbeddingModel& model,
                                  const ProxySet& proxies) {
  std::vector<double> params = model.params();
  const std::vector<double> flat = proxies.flatten();
  params.insert(params.end(), flat.begin(), flat.end());
  return params;
}

// Mini-batch AdamW over the model weights and proxy coordinates. Proxies are
// projected back to the unit sphere after every step.
std::vector<EpochLosses> train(EmbeddingModel& model, ProxySet& proxies,
                               const RowMatrix& features, int epochs,
                               const TrainConfig& tc, std::uint64_t seed,
                               const BatchLossFn& loss_fn,
                               const std::string& phase) {
  const std::size_t n = features.rows();
  const std::size_t batch_size = static_cast<std::size_t>(tc.batch_size);
  const std::size_t model_size = model.param_count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);

  std::vector<double> params = gather_params(model, proxies);
  numerics::OptimizerState opt = numerics::OptimizerState::for_size(
      params.size(), tc.learning_rate, tc.weight_decay);
  std::vector<EpochLosses> history;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    opt.learning_rate = numerics::lr_schedule(tc.learning_rate, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    EpochLosses sums;
    sums.epoch = epoch;
    std::size_t batches = 0;
    std::size_t clamps = 0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t stop = std::min(n, start + batch_size);
      const std::span<const std::size_t> idx(order.data() + start,
                                             stop - start);
      Tape tape(params);
      try {
        const EmbeddingModel::Leaves leaves = model.bind(tape, 0);
        const ProxyNodes pn = bind_proxies(tape, proxies, model_size);
        std::vector<Var> zs;
        zs.reserve(idx.size());
        for (std::size_t i : idx) {
          zs.push_back(model.embed(tape, leaves, features.row(i)));
        }
        BatchContext ctx{tape, idx, zs, pn, epoch, batches};
        const BatchTerms terms = loss_fn(ctx);
        const std::vector<double> grads = tape.gradient(terms.total);
        sums.total += tape.value(terms.total);
        if (terms.pa) sums.pa += tape.value(*terms.pa);
        if (terms.evt) sums.evt += tape.value(*terms.evt);
        if (terms.fr) sums.fr += tape.value(*terms.fr);
        if (terms.kd) sums.kd += tape.value(*terms.kd);
        numerics::adamw_step(params, grads, opt);
      } catch (const NonFiniteError& e) {
        throw NonFiniteError(phase + " epoch " + std::to_string(epoch) +
                             " batch " + std::to_string(batches) + ": " +
                             e.where());
      }
      clamps += tape.clamp_count();
      model.set_params(std::span<const double>(params).first(model_size));
      proxies.assign_from(std::span<const double>(params).subspan(model_size));
      proxies.renormalize();
      params = gather_params(model, proxies);
      ++batches;
    }
    const double inv = batches == 0 ? 0.0 : 1.0 / static_cast<double>(batches);
    sums.total *= inv;
    sums.pa *= inv;
    sums.evt *= inv;
    sums.fr *= inv;
    sums.kd *= inv;
    if (!std::isfinite(sums.total)) {
      throw NonFiniteError(phase + " epoch " + std::to_string(epoch) +
                           " mean loss");
    }
    if (clamps > 0) {
      spdlog::debug("{} epoch {}: exp argument clamped {} times", phase, epoch,
                    clamps);
    }
    spdlog::debug("{} epoch {}: loss {:.6f} (lr {:.3g})", phase, epoch,
                  sums.total, opt.learning_rate);
    history.push_back(sums);
  }
  return history;
}

ProxySet class_mean_proxies(const RowMatrix& embeddings,
                            std::span<const int> labels, int class_count) {
  const std::size_t d = embeddings.cols();
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(class_count),
                                        std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    auto& s = sums[static_cast<std::size_t>(labels[i])];
    const auto z = embeddings.row(i);
    for (std::size_t j = 0; j < d; ++j) s[j] += z[j];
  }
  ProxySet proxies;
  proxies.class_count = class_count;
  for (int c = 0; c < class_count; ++c) {
    proxies.proxies.push_back(
        Proxy{normalized(sums[static_cast<std::size_t>(c)]), c, 0});
  }
  return proxies;
}

std::vector<Var> constant_rows(Tape& tape, const RowMatrix& m,
                               std::span<const std::size_t> rows) {
  std::vector<Var> out;
  out.reserve(rows.size());
  for (std::size_t i : rows) out.push_back(tape.constant(m.row(i)));
  return out;
}

// Fits one Weibull per proxy on the labelled step embeddings. A proxy whose
// tail cannot be fitted is retried with replay features of the old proxies
// as extra opposite-class samples, then falls back to its previous fit.
std::vector<WeibullParams> refit_weibulls(
    const ProxySet& proxies, const RowMatrix& embeddings,
    std::span<const int> labels, int tau, std::span<const Proxy> old_proxies,
    std::span<const WeibullParams> previous, const ReplayConfig& replay,
    std::uint64_t seed) {
  std::vector<WeibullParams> out;
  out.reserve(proxies.size());
  for (std::size_t i = 0; i < proxies.size(); ++i) {
    const Proxy& p = proxies.proxies[i];
    try {
      const TailDistances tail =
          tail_distances(p.vector, p.class_id, embeddings, labels, tau);
      out.push_back(fit_weibull(tail.distances));
      continue;
    } catch (const std::invalid_argument&) {
    } catch (const DegenerateTailError&) {
    }
    try {
      ReplayConfig rc = replay;
      rc.samples_per_class = kFallbackReplaySamples;
      LabeledBatch extra = sample_replay_features(old_proxies, rc, seed + i);
      RowMatrix all = embeddings;
      std::vector<int> all_labels(labels.begin(), labels.end());
      for (std::size_t r = 0; r < extra.embeddings.rows(); ++r) {
        all.append_row(extra.embeddings.row(r));
        all_labels.push_back(extra.labels[r]);
      }
      const TailDistances tail =
          tail_distances(p.vector, p.class_id, all, all_labels, tau);
      out.push_back(fit_weibull(tail.distances));
      spdlog::debug("proxy {}: Weibull refit used replay features", i);
      continue;
    } catch (const std::invalid_argument&) {
    } catch (const DegenerateTailError&) {
    }
    if (i < previous.size()) {
      spdlog::debug("proxy {}: keeping previous Weibull fit", i);
      out.push_back(previous[i]);
    } else {
      throw std::runtime_error("cannot fit a Weibull for proxy " +
                               std::to_string(i));
    }
  }
  return out;
}

}  // namespace

InitialStageResult initial_stage(const RowMatrix& features,
                                 std::span<const int> labels,
                                 const ScenarioConfig& cfg) {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("initial_stage: features/labels mismatch");
  }
  const std::set<int> classes(labels.begin(), labels.end());
  if (classes.size() < 2) {
    throw std::invalid_argument(
        "initial_stage: need at least two classes to fit EVT tails");
  }
  const int class_count = static_cast<int>(classes.size());
  if (*classes.begin() != 0 || *classes.rbegin() != class_count - 1) {
    throw std::invalid_argument(
        "initial_stage: labels must be the contiguous range [0, M)");
  }
  if (features.cols() != cfg.input_dim) {
    throw std::invalid_argument("initial_stage: feature dimension mismatch");
  }

  const TrainConfig& tc = cfg.train;
  EmbeddingModel model = EmbeddingModel::random(
      cfg.layer_dims(), cfg.model.activation, mix_seed(tc.seed, 1));
  ProxySet proxies =
      class_mean_proxies(model.embed_all(features), labels, class_count);

  InitialStageResult result{
      .state = {model, PsiClassifier(proxies,
                                     std::vector<WeibullParams>(proxies.size()),
                                     cfg.evt.reject_threshold)},
      .pa_model = model,
      .pa_proxies = proxies,
  };

  result.pa_losses = train(
      model, proxies, features, tc.epochs_pa, tc, mix_seed(tc.seed, 2),
      [&](BatchContext& ctx) {
        std::vector<int> batch_labels;
        for (std::size_t i : ctx.indices) batch_labels.push_back(labels[i]);
        BatchTerms t;
        t.pa = pa_loss(ctx.tape, ctx.embeddings, batch_labels, ctx.proxies,
                       cfg.loss);
        t.total = *t.pa;
        return t;
      },
      "pa");
  result.pa_model = model;
  result.pa_proxies = proxies;

  const std::vector<WeibullParams> frozen = fit_proxy_weibulls(
      proxies, model.embed_all(features), labels, cfg.evt.tail_size);

  result.evt_losses = train(
      model, proxies, features, tc.epochs_evt, tc, mix_seed(tc.seed, 3),
      [&](BatchContext& ctx) {
        std::vector<int> batch_labels;
        for (std::size_t i : ctx.indices) batch_labels.push_back(labels[i]);
        BatchTerms t;
        t.evt = evt_loss(ctx.tape, ctx.embeddings, batch_labels, ctx.proxies,
                         frozen, cfg.loss.negatives);
        t.total = *t.evt;
        return t;
      },
      "evt");

  std::vector<WeibullParams> weibulls = fit_proxy_weibulls(
      proxies, model.embed_all(features), labels, cfg.evt.tail_size);
  result.state = ModelState{
      std::move(model),
      PsiClassifier(std::move(proxies), std::move(weibulls),
                    cfg.evt.reject_threshold)};
  return result;
}

ContinualStageResult continual_stage(
    int step, const RowMatrix& features, const ModelState& previous,
    const ScenarioConfig& cfg, std::optional<std::span<const bool>> novel_truth) {
  if (step < 1) throw std::invalid_argument("continual_stage: step must be >= 1");
  if (features.rows() == 0) {
    throw std::invalid_argument("continual_stage: empty step data");
  }
  if (novel_truth && novel_truth->size() != features.rows()) {
    throw std::invalid_argument("continual_stage: truth length mismatch");
  }
  const TrainConfig& tc = cfg.train;
  const std::size_t n = features.rows();

  // Step 1: split with the previous classifier. The previous model is the
  // distillation teacher, so these embeddings double as the teacher cache.
  const RowMatrix teacher = previous.model.embed_all(features);
  const KnownUnknownSplit split =
      split_known_unknown(teacher, previous.classifier);

  ContinualStageResult result{.state = previous};
  StageReport& report = result.report;
  report.step = step;
  report.known_count = split.known.size();
  report.unknown_count = split.unknown.size();

  std::vector<int> labels(n, -1);
  result.flagged_unknown.assign(n, false);
  for (std::size_t j = 0; j < split.known.size(); ++j) {
    labels[split.known[j]] = split.pseudo_labels[j];
  }
  for (std::size_t i : split.unknown) result.flagged_unknown[i] = true;
  if (novel_truth) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (result.flagged_unknown[i] == (*novel_truth)[i]) ++correct;
    }
    report.novelty_detection_accuracy =
        static_cast<double>(correct) / static_cast<double>(n);
  }

  // Step 2: cluster the unknowns and seed one proxy per cluster.
  const ProxySet& old_set = previous.proxies();
  const std::vector<Proxy> old_proxies = old_set.proxies;
  ProxySet proxies = old_set;
  const int previous_classes = old_set.class_count;
  if (!split.unknown.empty()) {
    const RowMatrix unknown = teacher.select(split.unknown);
    const ClusterResult clusters = affinity_propagation(unknown, cfg.ap);
    const RowMatrix centroids = cluster_centroids(clusters, unknown);
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const auto row = centroids.row(c);
      proxies.proxies.push_back(Proxy{{row.begin(), row.end()},
                                      previous_classes + static_cast<int>(c),
                                      step});
    }
    proxies.class_count += static_cast<int>(centroids.rows());
    for (std::size_t j = 0; j < split.unknown.size(); ++j) {
      labels[split.unknown[j]] =
          previous_classes + static_cast<int>(clusters.assignments[j]);
    }
    report.discovered_cluster_count = clusters.cluster_count();
    spdlog::debug("step {}: {} unknown samples -> {} clusters (converged {})",
                  step, split.unknown.size(), clusters.cluster_count(),
                  clusters.converged);
  }

  // Step 3: update on pseudo-labelled and clustered data with feature replay
  // around the previous proxies and distillation on known samples.
  const std::set<int> present(labels.begin(), labels.end());
  ReplayConfig replay = cfg.replay;
  const int replay_per_proxy =
      replay.samples_per_class > 0
          ? replay.samples_per_class
          : std::max(1, static_cast<int>(std::lround(
                            static_cast<double>(std::min<std::size_t>(
                                n, static_cast<std::size_t>(tc.batch_size))) /
                            static_cast<double>(present.size()))));
  replay.samples_per_class = replay_per_proxy;

  std::optional<std::vector<WeibullParams>> step_weibulls;
  if (tc.evt_in_continual) {
    step_weibulls = refit_weibulls(proxies, teacher, labels, cfg.evt.tail_size,
                                   old_proxies, previous.classifier.weibulls(),
                                   cfg.replay, mix_seed(tc.seed, 7, step));
  }

  EmbeddingModel model = previous.model;
  report.losses = train(
      model, proxies, features, tc.epochs_continual, tc,
      mix_seed(tc.seed, 4, static_cast<std::uint64_t>(step)),
      [&](BatchContext& ctx) {
        std::vector<int> batch_labels;
        std::vector<std::size_t> known_rows;
        std::vector<Var> student;
        for (std::size_t j = 0; j < ctx.indices.size(); ++j) {
          const std::size_t i = ctx.indices[j];
          batch_labels.push_back(labels[i]);
          if (!result.flagged_unknown[i]) {
            known_rows.push_back(i);
            student.push_back(ctx.embeddings[j]);
          }
        }
        const std::vector<Var> teacher_vars =
            constant_rows(ctx.tape, teacher, known_rows);
        TotalLossInputs in;
        in.embeddings = ctx.embeddings;
        in.labels = batch_labels;
        in.proxies = &ctx.proxies;
        in.kd_teacher = teacher_vars;
        in.kd_student = student;
        in.replay_proxies = old_proxies;
        in.replay = replay;
        in.replay_seed = mix_seed(tc.seed, 5, static_cast<std::uint64_t>(step),
                                  static_cast<std::uint64_t>(ctx.epoch) * 100003 +
                                      ctx.batch);
        const TotalLossTerms terms = total_loss(ctx.tape, in, cfg.loss);
        BatchTerms t{.total = terms.total, .pa = terms.pa};
        t.fr = terms.fr;
        t.kd = terms.kd;
        if (step_weibulls) {
          t.evt = evt_loss(ctx.tape, ctx.embeddings, batch_labels, ctx.proxies,
                           *step_weibulls, cfg.loss.negatives);
          t.total = ctx.tape.add(t.total, *t.evt);
        }
        return t;
      },
      "continual step " + std::to_string(step));

  // Step 4: refit every proxy's Weibull on the updated representation.
  const RowMatrix updated = model.embed_all(features);
  std::vector<WeibullParams> weibulls = refit_weibulls(
      proxies, updated, labels, cfg.evt.tail_size, old_proxies,
      previous.classifier.weibulls(), cfg.replay, mix_seed(tc.seed, 6, step));

  // Step 5: drop redundant new proxies.
  std::vector<std::size_t> new_ids;
  for (std::size_t i = old_proxies.size(); i < proxies.size(); ++i) {
    new_ids.push_back(i);
  }
  if (!new_ids.empty()) {
    ReductionResult reduced = reduce_model(proxies, weibulls, new_ids,
                                           cfg.evt.cover_threshold, labels);
    proxies = std::move(reduced.proxies);
    weibulls = std::move(reduced.weibulls);
    labels = std::move(reduced.labels);
    report.kept_proxy_count = reduced.kept_new_proxies;
  }

  result.labels = std::move(labels);
  result.state = ModelState{
      std::move(model), PsiClassifier(std::move(proxies), std::move(weibulls),
                                      cfg.evt.reject_threshold)};
  return result;
}

Evaluation evaluate_state(const ModelState& state, const RowMatrix& features,
                          std::span<const int> truth,
                          std::span<const bool> is_old, int step) {
  if (features.rows() != truth.size() || truth.size() != is_old.size()) {
    throw std::invalid_argument("evaluate_state: length mismatch");
  }
  Evaluation ev;
  ev.predictions.reserve(truth.size());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    ev.predictions.push_back(
        state.classifier.classify(state.model.embed(features.row(i))));
  }
  const ClusterMatching matching = match_clusters(ev.predictions, truth);
  ev.metrics.step = step;
  ev.metrics.m_all = matching.accuracy();
  const std::unique_ptr<bool[]> novel(new bool[is_old.size()]);
  bool any_old = false;
  bool any_new = false;
  for (std::size_t i = 0; i < is_old.size(); ++i) {
    novel[i] = !is_old[i];
    any_old = any_old || is_old[i];
    any_new = any_new || novel[i];
  }
  if (any_old) {
    ev.metrics.m_old = matching.accuracy_on(ev.predictions, truth, is_old);
  }
  if (any_new) {
    ev.metrics.m_new = matching.accuracy_on(
        ev.predictions, truth, std::span<const bool>(novel.get(), is_old.size()));
  }
  ev.metrics.estimated_category_count = state.classifier.class_count();
  return ev;
}

}  // namespace cgcd
