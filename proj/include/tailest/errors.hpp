#pragma once

#include <stdexcept>
#include <string>

namespace tailest {

/// Base class for recoverable estimation failures. `name()` is the stable
/// identifier used in CSV flags and CLI exit messages.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Tail event count at the requested threshold is zero; the threshold index
/// is too large for this sample.
class EmptyTailError : public EstimationError {
 public:
  explicit EmptyTailError(const std::string& what) : EstimationError("EmptyTail", what) {}
};

/// Tied order statistics make the quantile-based estimator undefined.
class DegenerateSpacingError : public EstimationError {
 public:
  explicit DegenerateSpacingError(const std::string& what)
      : EstimationError("DegenerateSpacing", what) {}
};

/// Reference order statistic is <= 1, so its logarithm cannot be used as a
/// denominator.
class InvalidBaseError : public EstimationError {
 public:
  explicit InvalidBaseError(const std::string& what) : EstimationError("InvalidBase", what) {}
};

/// No threshold index clears the count floor of the adaptive rule.
class NoAdmissibleKError : public EstimationError {
 public:
  explicit NoAdmissibleKError(const std::string& what)
      : EstimationError("NoAdmissibleK", what) {}
};

/// Sample size too small to build the lower-bound family; carries the name of
/// the violated construction condition.
class TooSmallNError : public EstimationError {
 public:
  TooSmallNError(std::string condition, const std::string& what)
      : EstimationError("TooSmallN", condition + ": " + what),
        condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// The left distribution places mass where the right one has none, so the KL
/// divergence is not computable by quadrature.
class SupportMismatchError : public EstimationError {
 public:
  explicit SupportMismatchError(const std::string& what)
      : EstimationError("SupportMismatch", what) {}
};

/// Not enough trial records to fit a convergence rate.
class InsufficientDataError : public EstimationError {
 public:
  explicit InsufficientDataError(const std::string& what)
      : EstimationError("InsufficientData", what) {}
};

}  // namespace tailest
