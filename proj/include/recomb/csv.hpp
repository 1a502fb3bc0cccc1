#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace recomb {

// Shortest round-trip decimal rendering (std::to_chars). Locale-free and
// bit-stable, so repeated runs emit identical bytes.
std::string format_double(double v);

std::string csv_escape(std::string_view field);

// Minimal RFC-4180 reader: quoted fields, embedded commas/quotes/newlines.
// Lines starting with '#' outside of quotes are skipped as comments.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  // Returns the next row, or nullopt at end of file. `line()` reports the
  // 1-based line number where the returned row started.
  std::optional<std::vector<std::string>> next();
  std::size_t line() const { return row_start_line_; }

 private:
  std::string data_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t row_start_line_ = 1;
  std::string path_;
};

// Splits "a;b;c" into parts; empty input gives an empty list.
std::vector<std::string> split_list(std::string_view field, char sep = ';');

std::string join_list(const std::vector<std::string>& parts, char sep = ';');

// Writes one CSV row with proper escaping and a trailing '\n'.
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace recomb
