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

#include "cgcd/matrix.h"

#include <stdexcept>

namespace cgcd {

RowMatrix::RowMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

RowMatrix::RowMatrix(std::size_t rows, std::size_t cols,
                     std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("RowMatrix: data size does not match shape");
  }
}

void RowMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw std::invalid_argument("RowMatrix: row width mismatch");
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

RowMatrix RowMatrix::select(std::span<const std::size_t> indices) const {
  RowMatrix out(0, cols_);
  out.data_.reserve(indices.size() * cols_);
  for (std::size_t i : indices) out.append_row(row(i));
  return out;
}

}  // namespace cgcd
