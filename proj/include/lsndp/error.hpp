#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lsndp {

// Bad input data: unparseable files, unresolved references, invalid actions.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parse failure pinned to a location in a tab-separated file.
class ParseError : public InputError {
 public:
  ParseError(std::string file, std::size_t line, std::size_t column,
             const std::string& what)
      : InputError(file + ":" + std::to_string(line) + ":" +
                   std::to_string(column) + ": " + what),
        file_(std::move(file)),
        line_(line),
        column_(column) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string file_;
  std::size_t line_;
  std::size_t column_;
};

// Internal consistency failure (flow conservation, breakdown identity, ...).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lsndp
