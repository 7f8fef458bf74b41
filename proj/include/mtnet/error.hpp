#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mtnet {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised by file/stream parsers; carries the 1-based line the record started on
// and, when known, the offending field.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : Error("line " + std::to_string(line) +
              (field.empty() ? "" : (", field '" + field + "'")) + ": " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace mtnet
