#include "recomb/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "recomb/errors.hpp"

namespace recomb {

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

std::string csv_escape(std::string_view field) {
  bool needs_quote = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quote) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

CsvReader::CsvReader(const std::string& path) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  data_ = ss.str();
}

std::optional<std::vector<std::string>> CsvReader::next() {
  while (pos_ < data_.size()) {
    // skip comment lines and blank lines
    if (data_[pos_] == '#') {
      while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      if (pos_ < data_.size()) {
        ++pos_;
        ++line_;
      }
      continue;
    }
    if (data_[pos_] == '\n') {
      ++pos_;
      ++line_;
      continue;
    }
    if (data_[pos_] == '\r' && pos_ + 1 < data_.size() &&
        data_[pos_ + 1] == '\n') {
      pos_ += 2;
      ++line_;
      continue;
    }
    break;
  }
  if (pos_ >= data_.size()) return std::nullopt;

  row_start_line_ = line_;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  while (pos_ < data_.size()) {
    char c = data_[pos_];
    if (in_quotes) {
      if (c == '"') {
        if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '"') {
          field.push_back('"');
          pos_ += 2;
        } else {
          in_quotes = false;
          ++pos_;
        }
      } else {
        if (c == '\n') ++line_;
        field.push_back(c);
        ++pos_;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      ++pos_;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      ++pos_;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '\n')
        ++pos_;
      ++pos_;
      ++line_;
      row.push_back(std::move(field));
      return row;
    } else {
      field.push_back(c);
      ++pos_;
    }
  }
  if (in_quotes)
    throw InputError(path_ + ": unterminated quoted field at line " +
                     std::to_string(row_start_line_));
  row.push_back(std::move(field));
  return row;
}

std::vector<std::string> split_list(std::string_view field, char sep) {
  std::vector<std::string> out;
  if (field.empty()) return out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= field.size(); ++i) {
    if (i == field.size() || field[i] == sep) {
      out.emplace_back(field.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string join_list(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os.put(',');
    os << csv_escape(fields[i]);
  }
  os.put('\n');
}

}  // namespace recomb
