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

#include "cgcd/io/json_io.h"

#include <json.hpp>

namespace cgcd::io {
namespace {

using nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json step_json(const StepMetrics& m) {
  ordered_json j;
  j["step"] = m.step;
  j["m_all"] = m.m_all;
  j["m_old"] = m.m_old;
  j["m_new"] = optional_number(m.m_new);
  j["estimated_category_count"] = m.estimated_category_count;
  return j;
}

}  // namespace

std::string stage_report_json(const StageReport& report) {
  ordered_json j;
  j["format_version"] = kReportFormatVersion;
  j["step"] = report.step;
  j["novelty_detection_accuracy"] =
      optional_number(report.novelty_detection_accuracy);
  j["known_count"] = report.known_count;
  j["unknown_count"] = report.unknown_count;
  j["discovered_cluster_count"] = report.discovered_cluster_count;
  j["kept_proxy_count"] = report.kept_proxy_count;
  ordered_json losses = ordered_json::array();
  for (const EpochLosses& e : report.losses) {
    losses.push_back({{"epoch", e.epoch},
                      {"total", e.total},
                      {"pa", e.pa},
                      {"evt", e.evt},
                      {"fr", e.fr},
                      {"kd", e.kd}});
  }
  j["losses"] = std::move(losses);
  j["metrics"] = step_json(report.metrics);
  return j.dump(2) + "\n";
}

std::string scenario_metrics_json(const ScenarioMetrics& metrics) {
  ordered_json j;
  j["format_version"] = kReportFormatVersion;
  j["initial_accuracy"] = metrics.initial_accuracy;
  if (!metrics.steps.empty()) {
    const StepMetrics& last = metrics.steps.back();
    j["m_all"] = last.m_all;
    j["m_old"] = last.m_old;
    j["m_new"] = optional_number(last.m_new);
    j["estimated_category_count"] = last.estimated_category_count;
  }
  j["m_f"] = metrics.m_f;
  j["m_d"] = optional_number(metrics.m_d);
  ordered_json recall = ordered_json::object();
  for (const auto& [k, v] : metrics.recall_at_k) recall[std::to_string(k)] = v;
  j["recall_at_k"] = std::move(recall);
  ordered_json steps = ordered_json::array();
  for (const StepMetrics& m : metrics.steps) steps.push_back(step_json(m));
  j["steps"] = std::move(steps);
  return j.dump(2) + "\n";
}

}  // namespace cgcd::io
