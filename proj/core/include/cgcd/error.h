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

#ifndef CGCD_ERROR_H_
#define CGCD_ERROR_H_

#include <stdexcept>
#include <string>

namespace cgcd {

// Raised when a computation produces NaN or Inf. `where` names the
// primitive or stage that produced the value.
class NonFiniteError : public std::runtime_error {
 public:
  explicit NonFiniteError(std::string where);
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Raised when a Weibull tail has no spread to fit.
class DegenerateTailError : public std::runtime_error {
 public:
  DegenerateTailError();
};

// Malformed files, version mismatches and truncated documents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A document written by an unsupported format version.
class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Invalid or unknown configuration keys and values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input file that does not exist.
class MissingFileError : public std::runtime_error {
 public:
  explicit MissingFileError(std::string path);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace cgcd

#endif  // CGCD_ERROR_H_
