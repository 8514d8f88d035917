#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace elm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PointOutsideDomain : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class GradientUnavailable : public Error {
 public:
  using Error::Error;
};

class NonPositiveEpsilon : public Error {
 public:
  NonPositiveEpsilon() : Error("diffusion coefficient must be positive") {}
};

class SolverDiverged : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& reason)
      : Error(field + ": " + reason), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace elm
