#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mobknot {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A curve violates an immersion or embedding invariant. Carries the grid
/// indices where the violation was detected.
class InvalidKnotError : public Error {
public:
  explicit InvalidKnotError(const std::string& what, std::vector<int> indices = {})
      : Error(what), indices_(std::move(indices)) {}
  const std::vector<int>& indices() const noexcept { return indices_; }

private:
  std::vector<int> indices_;
};

/// A point hit (or came too close to) the center of a sphere inversion, so
/// the image would not be compact.
class PoleError : public Error {
public:
  using Error::Error;
};

/// Two grid quantities that must live on the same sampling do not.
class GridMismatchError : public Error {
public:
  using Error::Error;
};

/// A weight function dipped below the division floor on a non-circular knot.
class DegenerateWeightError : public Error {
public:
  explicit DegenerateWeightError(const std::string& what, std::vector<int> indices = {})
      : Error(what), indices_(std::move(indices)) {}
  const std::vector<int>& indices() const noexcept { return indices_; }

private:
  std::vector<int> indices_;
};

/// Backtracking line search ran out of halvings without finding a descent step.
class StepFailureError : public Error {
public:
  using Error::Error;
};

/// A caller-supplied argument is outside its documented domain.
class InvalidArgumentError : public Error {
public:
  using Error::Error;
};

/// File or format problem in the IO layer.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace mobknot
