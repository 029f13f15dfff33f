#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hessgeo {

/// Argument outside the mathematical domain of an operation (bad index,
/// order out of range, non-unit direction, T_m <= 0 where F_m is needed).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Degenerate parametrization or embedding: the metric tensor is singular
/// (or not finite) at the evaluated point.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sub-barrier construction could not meet its sampled requirements.
class ConstructionFailure : public std::runtime_error {
 public:
  ConstructionFailure(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Expression text could not be parsed.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hessgeo
