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

#include "cgcd/io/checkpoint.h"

#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cgcd/error.h"
#include "cgcd/pipeline/stages.h"

namespace cgcd::io {
namespace {

using nlohmann::ordered_json;

ordered_json step_json(const StepMetrics& m) {
  return {{"step", m.step},
          {"m_all", m.m_all},
          {"m_old", m.m_old},
          {"m_new", m.m_new ? ordered_json(*m.m_new) : ordered_json(nullptr)},
          {"estimated_category_count", m.estimated_category_count}};
}

StepMetrics step_from_json(const ordered_json& j) {
  StepMetrics m;
  m.step = j.at("step").get<int>();
  m.m_all = j.at("m_all").get<double>();
  m.m_old = j.at("m_old").get<double>();
  if (!j.at("m_new").is_null()) m.m_new = j.at("m_new").get<double>();
  m.estimated_category_count = j.at("estimated_category_count").get<int>();
  return m;
}

}  // namespace

std::string format_checkpoint(const Checkpoint& ckpt) {
  ordered_json j;
  j["format"] = kCheckpointFormat;
  j["model"] = {{"layer_dims", ckpt.model.layer_dims()},
                {"activation", activation_name(ckpt.model.activation())},
                {"params", ckpt.model.params()}};
  const ProxySet& proxies = ckpt.classifier.proxies();
  ordered_json items = ordered_json::array();
  for (std::size_t i = 0; i < proxies.size(); ++i) {
    const Proxy& p = proxies.proxies[i];
    const WeibullParams& w = ckpt.classifier.weibulls()[i];
    items.push_back({{"class_id", p.class_id},
                     {"origin_step", p.origin_step},
                     {"vector", p.vector},
                     {"shape", w.shape},
                     {"scale", w.scale},
                     {"tail_size_used", w.tail_size_used}});
  }
  j["class_count"] = proxies.class_count;
  j["reject_threshold"] = ckpt.classifier.reject_threshold();
  j["proxies"] = std::move(items);
  j["initial_classes"] = ckpt.initial_classes;
  j["recall_ks"] = ckpt.recall_ks;
  ordered_json history = ordered_json::array();
  for (const StepMetrics& m : ckpt.history) history.push_back(step_json(m));
  j["history"] = std::move(history);
  return j.dump(1) + "\n";
}

Checkpoint parse_checkpoint(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw FormatError(std::string("malformed or truncated checkpoint: ") +
                      e.what());
  }
  try {
    const std::string format = j.at("format").get<std::string>();
    if (format != kCheckpointFormat) {
      throw VersionError("checkpoint format '" + format +
                         "' is not supported (this build reads '" +
                         std::string(kCheckpointFormat) + "')");
    }
    const ordered_json& m = j.at("model");
    EmbeddingModel model(
        m.at("layer_dims").get<std::vector<std::size_t>>(),
        parse_activation(m.at("activation").get<std::string>()),
        m.at("params").get<std::vector<double>>());
    ProxySet proxies;
    proxies.class_count = j.at("class_count").get<int>();
    std::vector<WeibullParams> weibulls;
    for (const ordered_json& p : j.at("proxies")) {
      proxies.proxies.push_back(Proxy{p.at("vector").get<std::vector<double>>(),
                                      p.at("class_id").get<int>(),
                                      p.at("origin_step").get<int>()});
      weibulls.push_back(WeibullParams{p.at("shape").get<double>(),
                                       p.at("scale").get<double>(),
                                       p.at("tail_size_used").get<int>()});
    }
    if (proxies.dim() != model.embedding_dim()) {
      throw FormatError("checkpoint proxies do not match the model dimension");
    }
    PsiClassifier classifier(std::move(proxies), std::move(weibulls),
                             j.at("reject_threshold").get<double>());
    Checkpoint ckpt{std::move(model), std::move(classifier),
                    j.at("initial_classes").get<std::vector<int>>(),
                    j.at("recall_ks").get<std::vector<int>>(),
                    {}};
    for (const ordered_json& h : j.at("history")) {
      ckpt.history.push_back(step_from_json(h));
    }
    return ckpt;
  } catch (const ordered_json::exception& e) {
    throw FormatError(std::string("invalid checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid checkpoint: ") + e.what());
  }
}

void write_checkpoint(const std::filesystem::path& path,
                      const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_checkpoint(ckpt);
  if (!out.flush()) throw std::runtime_error("cannot write " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

ScenarioMetrics evaluate_checkpoint(const Checkpoint& ckpt,
                                    const RowMatrix& features,
                                    std::span<const int> labels) {
  const std::set<int> initial(ckpt.initial_classes.begin(),
                              ckpt.initial_classes.end());
  const std::unique_ptr<bool[]> is_old(new bool[labels.size()]);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    is_old[i] = initial.contains(labels[i]);
  }
  const ModelState state{ckpt.model, ckpt.classifier};
  const int final_step = static_cast<int>(ckpt.history.size());
  const Evaluation ev = evaluate_state(
      state, features, labels,
      std::span<const bool>(is_old.get(), labels.size()), final_step);

  ScenarioMetrics out;
  out.steps = ckpt.history;
  out.steps.push_back(ev.metrics);
  std::vector<double> m_old;
  std::vector<double> m_new;
  for (const StepMetrics& s : out.steps) {
    m_old.push_back(s.m_old);
    if (s.step > 0 && s.m_new) m_new.push_back(*s.m_new);
  }
  out.initial_accuracy = out.steps.front().m_old;
  out.m_f = forgetting(m_old);
  if (!m_new.empty()) out.m_d = discovery(m_new);
  out.recall_at_k =
      recall_at_k(ckpt.model.embed_all(features), labels, ckpt.recall_ks);
  return out;
}

}  // namespace cgcd::io
