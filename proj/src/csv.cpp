// SPDX-License-Identifier: Apache-2.0
#include "windcast/csv.hpp"

#include <array>
#include <charconv>

#include "windcast/error.hpp"

namespace windcast {

std::optional<std::vector<std::string>> CsvReader::next() {
  while (true) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    record_line_ = next_line_;
    int ch;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
      any = true;
      const char c = static_cast<char>(ch);
      if (in_quotes) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++next_line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"') {
        in_quotes = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\r') {
        if (in_.peek() == '\n') in_.get();
        ++next_line_;
        break;
      } else if (c == '\n') {
        ++next_line_;
        break;
      } else {
        field.push_back(c);
      }
    }
    if (in_quotes) {
      throw FormatError("csv: unterminated quoted field starting on line " +
                        std::to_string(record_line_));
    }
    if (!any) return std::nullopt;
    if (fields.empty() && field.empty()) continue;  // blank line
    fields.push_back(std::move(field));
    return fields;
  }
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += csv_field(fields[i]);
  }
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

}  // namespace windcast
