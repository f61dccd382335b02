#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace elaine {

/// Base class for recoverable failures caused by bad input or a failed run.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a documented domain constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss during optimization.
class TrainingFault : public Error {
 public:
  using Error::Error;
};

/// Caller broke a precondition (shape mismatch, wrong mode, bad index).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define ELAINE_EXPECTS(cond, msg)                   \
  do {                                              \
    if (!(cond)) throw ::elaine::ContractViolation( \
        std::string("contract violated: ") + (msg)); \
  } while (false)

}  // namespace elaine
