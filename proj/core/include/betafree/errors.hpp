#pragma once

#include <stdexcept>
#include <string>

namespace betafree {

/// Points of mismatched kind or dimension passed to a metric.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad numeric parameter (out of range, empty input, non-monotone model...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The metric does not support the requested operation (e.g. ball
/// intersection in total-variation space).
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A base estimator could not produce an estimate for its input.
class BreakdownError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace betafree
