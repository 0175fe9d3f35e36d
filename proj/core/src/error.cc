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

#include "cgcd/error.h"

namespace cgcd {

NonFiniteError::NonFiniteError(std::string where)
    : std::runtime_error("non-finite value produced by " + where),
      where_(std::move(where)) {}

DegenerateTailError::DegenerateTailError()
    : std::runtime_error("degenerate tail: all values identical") {}

MissingFileError::MissingFileError(std::string path)
    : std::runtime_error("missing input file: " + path), path_(std::move(path)) {}

}  // namespace cgcd
