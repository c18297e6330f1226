#pragma once

#include <stdexcept>
#include <string>

namespace lexopt {

// Broad failure classes. The CLI maps them onto process exit codes.
enum class ErrorKind {
  Usage = 1,       // bad configuration or arguments
  Data = 2,        // malformed or invalid input data
  Numeric = 3,     // numerical failure during estimation or optimization
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

/// Invalid UTF-8 in an input stream.
class DecodeError : public DataError {
 public:
  DecodeError(std::size_t offset, const std::string& what)
      : DataError(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A malformed line in a TSV input.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace lexopt
