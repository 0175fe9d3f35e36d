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

#ifndef CGCD_CLI_COMMANDS_H_
#define CGCD_CLI_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

namespace cgcd::cli {

// Exit codes of the cgcd tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // bad flags, invalid config, other failures
inline constexpr int kExitMissing = 2;  // an input file does not exist
inline constexpr int kExitFormat = 3;   // manifest, version or format mismatch

// Runs `cgcd <args...>`; args exclude the program name.
//   generate --config C --out-dir D [--seed S]
//   run      --config C --data-dir D --out-dir O [--seed S]
//   eval     --checkpoint P --eval-csv E
// The CGCD_SEED environment variable supplies the seed when --seed is absent.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace cgcd::cli

#endif  // CGCD_CLI_COMMANDS_H_
