#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trajkit::csv {

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_record(std::string_view line, char delimiter = ',');

/// Parses a finite double; returns nullopt on blank or malformed input.
std::optional<double> parse_double(std::string_view cell);

/// Line-oriented reader that skips blank lines and comment lines, strips a
/// UTF-8 BOM and trailing CR.
class Reader {
 public:
  explicit Reader(std::istream& in, std::string comment_prefix = "#", char delimiter = ',');

  /// Next record, or nullopt at end of input.
  std::optional<std::vector<std::string>> next();

  /// 1-based physical line number of the last record returned.
  std::size_t line_number() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::string comment_prefix_;
  char delimiter_;
  std::size_t line_no_ = 0;
};

/// Formats with exactly `decimals` digits after the point, '.' separator.
std::string format_fixed(double value, int decimals = 6);

}  // namespace trajkit::csv
