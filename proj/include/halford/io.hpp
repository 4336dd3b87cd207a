// Copyright 2026 The Halford Authors
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

#ifndef HALFORD_IO_HPP
#define HALFORD_IO_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "halford/errors.hpp"

namespace halford {

/// Shortest decimal form that round-trips to the same double; infinities
/// serialize as "inf"/"-inf". NaN has no serialized form and throws.
inline std::string format_double(double v) {
  if (std::isnan(v)) throw FormatError("NaN has no serialized form");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// CSV field for a possibly-missing value; absent serializes as the empty
/// field (the NA convention).
inline std::string format_optional(const std::optional<double>& v) {
  return v.has_value() ? format_double(*v) : std::string();
}

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Renders with a header row, comma separation, and \n line endings.
std::string render_csv(const CsvTable& table);

/// Writes content creating parent directories; throws IoError on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace halford

#endif  // HALFORD_IO_HPP
