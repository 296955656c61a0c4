// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace windcast {

/// Streaming RFC 4180 reader: quoted fields, doubled quotes, embedded commas
/// and line breaks, LF or CRLF record separators.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input. A blank line yields no record.
  std::optional<std::vector<std::string>> next();
  /// 1-based physical line on which the last returned record started.
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t next_line_ = 1;
  std::size_t record_line_ = 0;
};

/// Quotes the field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view value);
std::string csv_row(const std::vector<std::string>& fields);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace windcast
