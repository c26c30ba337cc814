#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scaffold/common.hpp"

// RFC 4180: comma separated, CRLF line endings, header row. Text fields are
// always quoted; numeric fields never are.

namespace scaffold::csv {

class CsvError : public Error {
 public:
  using Error::Error;
};

struct Field {
  std::string value;
  bool quoted = true;
};

inline Field text(std::string v) { return {std::move(v), true}; }
inline Field number(double v) { return {format_g9(v), false}; }
inline Field integer(long long v) { return {std::to_string(v), false}; }

inline std::string encode_field(const Field& f) {
  if (!f.quoted) return f.value;
  std::string out = "\"";
  for (char c : f.value) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::string encode_row(const std::vector<Field>& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += encode_field(row[i]);
  }
  out += "\r\n";
  return out;
}

inline std::string encode_header(const std::vector<std::string>& names) {
  std::vector<Field> row;
  for (const auto& n : names) row.push_back({n, false});
  return encode_row(row);
}

using Table = std::vector<std::vector<std::string>>;

// Accepts CRLF or LF line endings and quoted fields spanning lines.
inline Table parse(std::string_view text) {
  Table rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (in_quotes) throw CsvError("unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

// Column index by header name.
inline std::size_t column(const std::vector<std::string>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw CsvError("missing column '" + std::string(name) + "'");
}

}  // namespace scaffold::csv
