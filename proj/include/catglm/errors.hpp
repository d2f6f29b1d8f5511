#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace catglm {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation: bad probability,
// invalid parameter value, malformed permutation, and the like.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Evaluation point outside the support of a restricted-support cdf
// (exponential or Pareto). Carries the violating value so callers can report
// which predictor broke the positivity constraint.
class SupportViolation : public Error {
 public:
  SupportViolation(const std::string& what, double value)
      : Error(what), value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

// reflect() requested for a family whose reflection is not representable in
// the supported family set (exponential, Pareto).
class UnsupportedReflection : public Error {
 public:
  using Error::Error;
};

// Ratio vector outside the image of the ratio map, e.g. a non-increasing
// cumulative ratio vector.
class InvalidRatio : public Error {
 public:
  using Error::Error;
};

// Recoverable constraint failure (cumulative eta ordering or cdf support) at
// the listed observations. The fitter reacts with step halving.
class ConstraintViolation : public Error {
 public:
  ConstraintViolation(const std::string& what, std::vector<int> indices = {})
      : Error(what), indices_(std::move(indices)) {}
  const std::vector<int>& observation_indices() const { return indices_; }

 private:
  std::vector<int> indices_;
};

// Non-finite values or an unusable linear system; step control cannot fix
// this, the fit aborts.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// No feasible parameter region remains: the model is undefined on this data.
class ModelUndefined : public Error {
 public:
  using Error::Error;
};

// A transform plan was requested for a model that does not satisfy the
// plan's hypotheses.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

}  // namespace catglm
