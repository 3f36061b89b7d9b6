#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace invchar {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or type invariant was violated (bad parameter value,
/// mismatched array sizes, out-of-range tolerance, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The device delivers no discharge current at full gate drive.
class NonDischargingError : public Error {
 public:
  using Error::Error;
};

/// The transient integrator exceeded its step or refinement budget.
class StepLimitError : public Error {
 public:
  using Error::Error;
};

/// The least-squares design matrix lost rank (e.g. duplicate abscissae).
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

/// Goodness-of-fit statistics are undefined for the given data
/// (zero variance with nonzero residual).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Samples do not cover the full Cartesian grid. `missing` lists the
/// absent (x, y) nodes.
class IncompleteGridError : public Error {
 public:
  IncompleteGridError(const std::string& msg, std::vector<std::pair<double, double>> missing_cells)
      : Error(msg), missing(std::move(missing_cells)) {}
  std::vector<std::pair<double, double>> missing;
};

/// Two samples land on the same grid node with conflicting values.
class DuplicateSampleError : public Error {
 public:
  using Error::Error;
};

/// Fewer than two distinct values survive on a surface axis.
class DegenerateAxisError : public Error {
 public:
  using Error::Error;
};

/// A model build was not given exactly one sweep per parameter.
class MissingSweepError : public Error {
 public:
  using Error::Error;
};

/// A model evaluation produced a non-positive current (far extrapolation).
class NonPhysicalError : public Error {
 public:
  using Error::Error;
};

/// A delay model was paired with a current model it was not built from.
class ModelMismatchError : public Error {
 public:
  using Error::Error;
};

/// File or stream I/O failure, malformed input file.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace invchar
