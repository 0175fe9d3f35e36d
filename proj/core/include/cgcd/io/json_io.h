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

#ifndef CGCD_IO_JSON_IO_H_
#define CGCD_IO_JSON_IO_H_

#include <string>
#include <string_view>

#include "cgcd/metrics.h"
#include "cgcd/pipeline/stages.h"

namespace cgcd::io {

inline constexpr std::string_view kReportFormatVersion = "cgcd-report-v1";

// Pretty-printed JSON documents with a top-level `format_version`. Doubles
// are written as the shortest text that round-trips exactly.
std::string stage_report_json(const StageReport& report);

// Keys: format_version, initial_accuracy, m_all, m_old, m_new (final stage),
// m_f, m_d (null without continual steps), recall_at_k, steps.
std::string scenario_metrics_json(const ScenarioMetrics& metrics);

}  // namespace cgcd::io

#endif  // CGCD_IO_JSON_IO_H_
