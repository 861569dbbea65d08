/*
 * Copyright 2026 The lbo Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// CSV output: header row, comma separators, LF line endings, '.' decimal
// point. Numbers are written in shortest round-trip form so reruns are
// byte-identical.

#include <cerrno>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "lbo/detail/format.hpp"
#include "lbo/errors.hpp"

namespace lbo::harness {

using CsvRow = std::vector<std::string>;

inline std::string csv_num(double v) { return detail::format_double(v); }
inline std::string csv_num(long long v) { return std::to_string(v); }
inline std::string csv_num(int v) { return std::to_string(v); }
inline std::string csv_bool(bool b) { return b ? "1" : "0"; }

/// Quotes a field when it contains a separator, quote or line break.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline void write_csv(std::ostream& os, const CsvRow& header, const std::vector<CsvRow>& rows) {
  auto line = [&](const CsvRow& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) os << ',';
      os << csv_field(r[i]);
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size())
      throw InvalidArgument("csv row has " + std::to_string(r.size()) + " fields, header has " +
                            std::to_string(header.size()));
    line(r);
  }
}

/// Writes (overwrites) `path`.
inline void write_metrics(const CsvRow& header, const std::vector<CsvRow>& rows,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing: " + std::strerror(errno));
  write_csv(out, header, rows);
  out.flush();
  if (!out) throw Error("write failed: " + path);
}

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;
};

/// Parses what write_csv() produces: quoted fields may hold separators,
/// doubled quotes and line breaks. A trailing CR before LF is dropped.
inline CsvTable read_csv(std::istream& is) {
  std::vector<CsvRow> records;
  CsvRow record;
  std::string field;
  bool quoted = false, any = false;
  char c;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
  };
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_field();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw InvalidArgument("csv: unterminated quoted field");
  if (any) {
    end_field();
    records.push_back(std::move(record));
  }
  if (records.empty()) throw InvalidArgument("csv: missing header row");
  CsvTable t{std::move(records.front()), {}};
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != t.header.size())
      throw InvalidArgument("csv: line " + std::to_string(i + 1) + " has " +
                            std::to_string(records[i].size()) + " fields, header has " +
                            std::to_string(t.header.size()));
    t.rows.push_back(std::move(records[i]));
  }
  return t;
}

inline CsvTable read_metrics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path + " for reading: " + std::strerror(errno));
  try {
    return read_csv(in);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

}  // namespace lbo::harness
