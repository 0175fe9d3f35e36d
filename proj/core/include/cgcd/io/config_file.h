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

#ifndef CGCD_IO_CONFIG_FILE_H_
#define CGCD_IO_CONFIG_FILE_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "cgcd/pipeline/config.h"

namespace cgcd::io {

// INI document with one section per config type:
//   [scenario] [model] [evt] [loss] [replay] [train] [ap]
// Keys missing from the document keep their defaults. Unknown sections and
// keys, malformed values and failed validation raise ConfigError.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Every key with its current value; parse_config(format_config(c)) == c.
std::string format_config(const ScenarioConfig& cfg);

}  // namespace cgcd::io

#endif  // CGCD_IO_CONFIG_FILE_H_
