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

#include "cgcd/io/csv.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cgcd/error.h"

namespace cgcd::io {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw std::runtime_error("cannot write " + path.string());
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

template <typename T>
T parse_field(std::string_view field, const std::string& where) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() ||
      field.empty()) {
    throw FormatError(where + ": cannot parse '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_dataset_csv(const RowMatrix& features,
                               std::span<const int> labels) {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("format_dataset_csv: row count mismatch");
  }
  std::string out = "label";
  for (std::size_t j = 0; j < features.cols(); ++j) {
    out += ",f" + std::to_string(j);
  }
  out += "\n";
  for (std::size_t i = 0; i < features.rows(); ++i) {
    out += std::to_string(labels[i]);
    for (double v : features.row(i)) {
      out += ",";
      out += format_double(v);
    }
    out += "\n";
  }
  return out;
}

LabeledRows parse_dataset_csv(std::string_view text, const std::string& source) {
  const std::vector<std::string_view> lines = split_lines(text);
  if (lines.empty()) throw FormatError(source + ": empty file");
  const std::vector<std::string_view> header = split_fields(lines.front());
  if (header.empty() || header.front() != "label") {
    throw FormatError(source + ": header must start with 'label'");
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t j = 0; j < dim; ++j) {
    if (header[j + 1] != "f" + std::to_string(j)) {
      throw FormatError(source + ": unexpected column '" +
                        std::string(header[j + 1]) + "'");
    }
  }
  LabeledRows rows;
  rows.features = RowMatrix(0, dim);
  std::vector<double> buffer(dim);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = source + " line " + std::to_string(i + 1);
    const std::vector<std::string_view> fields = split_fields(lines[i]);
    if (fields.size() != dim + 1) {
      throw FormatError(where + ": expected " + std::to_string(dim + 1) +
                        " fields, got " + std::to_string(fields.size()));
    }
    const int label = parse_field<int>(fields[0], where);
    if (label < -1) throw FormatError(where + ": label must be >= -1");
    rows.labels.push_back(label);
    for (std::size_t j = 0; j < dim; ++j) {
      buffer[j] = parse_field<double>(fields[j + 1], where);
    }
    rows.features.append_row(buffer);
  }
  return rows;
}

void write_dataset_csv(const std::filesystem::path& path,
                       const RowMatrix& features, std::span<const int> labels) {
  dump(path, format_dataset_csv(features, labels));
}

LabeledRows read_dataset_csv(const std::filesystem::path& path) {
  return parse_dataset_csv(slurp(path), path.string());
}

void write_labels_csv(const std::filesystem::path& path,
                      std::span<const int> labels) {
  std::string out = "label\n";
  for (int y : labels) out += std::to_string(y) + "\n";
  dump(path, out);
}

std::vector<int> read_labels_csv(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  const std::vector<std::string_view> lines = split_lines(text);
  if (lines.empty() || lines.front() != "label") {
    throw FormatError(path.string() + ": expected a 'label' header");
  }
  std::vector<int> labels;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    labels.push_back(parse_field<int>(
        lines[i], path.string() + " line " + std::to_string(i + 1)));
  }
  return labels;
}

}  // namespace cgcd::io
