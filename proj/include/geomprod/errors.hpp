#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "geomprod/format.hpp"

namespace geomprod {

/// Base of every error raised by the library. code() is a stable
/// machine-readable identifier; what() is the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Violated precondition on caller-supplied parameters (bad ratio, empty set, ...).
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error("InvalidArgument", message) {}
};

/// Exact integer arithmetic exceeded its representation.
class Overflow : public Error {
 public:
  explicit Overflow(const std::string& message) : Error("Overflow", message) {}
};

/// Numerical failure of the estimator on otherwise valid input.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonPositiveSample : public DomainError {
 public:
  NonPositiveSample(double abscissa, double value, const std::string& context)
      : DomainError("NonPositiveSample",
                    "f(" + format_double(abscissa) + ") = " + format_double(value) +
                        " is not positive" + (context.empty() ? "" : " (" + context + ")")),
        abscissa_(abscissa),
        value_(value) {}

  double abscissa() const noexcept { return abscissa_; }
  double value() const noexcept { return value_; }

 private:
  double abscissa_;
  double value_;
};

class DomainCoverage : public DomainError {
 public:
  DomainCoverage(double abscissa, double lo, double hi, const std::string& context)
      : DomainError("DomainCoverage",
                    "abscissa " + format_double(abscissa) + " outside sampled range [" +
                        format_double(lo) + ", " + format_double(hi) + "]" +
                        (context.empty() ? "" : " (" + context + ")")),
        abscissa_(abscissa) {}

  double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

class NonFiniteResult : public DomainError {
 public:
  explicit NonFiniteResult(const std::string& message)
      : DomainError("NonFiniteResult", message) {}
};

/// Input data that cannot be normalized into a valid signal.
class NormalizationError : public DomainError {
 public:
  NormalizationError(std::string code, const std::string& message)
      : DomainError(std::move(code), message) {}
};

/// File access or malformed file content.
class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("IoError", message) {}
  IoError(std::string code, const std::string& message) : Error(std::move(code), message) {}
};

class CsvError : public IoError {
 public:
  CsvError(std::string code, const std::string& message, std::size_t line)
      : IoError(std::move(code), line == 0 ? message
                                           : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  /// 1-based line number, 0 when the error concerns the file as a whole.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace geomprod
