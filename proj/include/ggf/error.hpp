#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ggf {

// Root of every error raised by the library. Subclasses identify the failure
// family so that callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of operands do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An input value lies outside the domain of the operation (e.g. a negative
// entry passed to a fractional power).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A configuration or hyperparameter value is invalid.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A subject, item or row index is out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Malformed text or binary input. `line()` is 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string file = {}, std::size_t line = 0)
      : Error(format(what, file, line)), file_(std::move(file)), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& what, const std::string& file,
                            std::size_t line) {
    std::string out;
    if (!file.empty()) out += file;
    if (line > 0) out += (out.empty() ? "line " : ":") + std::to_string(line);
    if (!out.empty()) out += ": ";
    return out + what;
  }

  std::string file_;
  std::size_t line_;
};

// Well-formed input that violates the declared schema (index overflow...).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Input that parses but violates a dataset invariant (empty group, leakage).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The evaluation protocol cannot be satisfied (too few negatives, masked
// positive, empty validation split).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// A configured memory or size budget would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed (singular system...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ggf
