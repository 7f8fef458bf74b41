#pragma once

// Minimal RFC-4180 CSV reader/writer: quoted fields, doubled quotes,
// embedded commas and newlines, CRLF line endings.

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mtnet/error.hpp"

namespace mtnet::csv {

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Reads one record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    // skip blank lines between records
    while (c == '\n' || c == '\r') {
      if (c == '\n') ++line_;
      c = in_.get();
    }
    if (c == std::istream::traits_type::eof()) return false;

    record_line_ = line_;
    std::string field;
    bool in_quotes = false;
    bool started_quoted = false;
    while (true) {
      if (c == std::istream::traits_type::eof()) {
        if (in_quotes) throw ParseError(record_line_, "", "unterminated quoted field");
        fields.push_back(std::move(field));
        return true;
      }
      char ch = static_cast<char>(c);
      if (in_quotes) {
        if (ch == '"') {
          int peek = in_.peek();
          if (peek == '"') {
            in_.get();
            field.push_back('"');
          } else {
            in_quotes = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
      } else if (ch == '"' && field.empty() && !started_quoted) {
        in_quotes = true;
        started_quoted = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        started_quoted = false;
      } else if (ch == '\r') {
        // swallow; record ends at the following '\n'
      } else if (ch == '\n') {
        ++line_;
        fields.push_back(std::move(field));
        return true;
      } else {
        field.push_back(ch);
      }
      c = in_.get();
    }
  }

  // 1-based line number where the last record returned by next() started.
  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 1;
};

inline std::string escape(std::string_view field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(field);
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

template <typename Range>
void write_row(std::ostream& os, const Range& fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) os.put(',');
    os << escape(f);
    first = false;
  }
  os.put('\n');
}

}  // namespace mtnet::csv
