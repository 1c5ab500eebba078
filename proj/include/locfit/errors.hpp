#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace locfit {

// Parameters or arguments outside their mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller broke a precondition that is not a numeric domain (empty input,
// incompatible descriptors, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SampleTooSmall : public ContractError {
 public:
  using ContractError::ContractError;
};

class UndefinedCV : public DomainError {
 public:
  using DomainError::DomainError;
};

// Truncation point carries all of the probability mass.
class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

class FitFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CvFailed : public std::runtime_error {
 public:
  CvFailed(std::size_t fold, const std::string& what)
      : std::runtime_error("cross-validation fold " + std::to_string(fold) + " failed: " + what),
        fold_(fold) {}
  std::size_t fold() const noexcept { return fold_; }

 private:
  std::size_t fold_;
};

class MeasurementError : public std::runtime_error {
 public:
  MeasurementError(std::string run, const std::string& what)
      : std::runtime_error(run + ": " + what), run_(std::move(run)) {}
  const std::string& run() const noexcept { return run_; }

 private:
  std::string run_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace locfit
