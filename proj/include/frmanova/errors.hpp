#pragma once

#include <stdexcept>
#include <string>

namespace frmanova {

/// Rejected input: malformed data files, invalid argument combinations,
/// out-of-range parameters. Maps to exit code 2 in the command line tool.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure that no amount of input validation can rule out,
/// e.g. a covariance factorization that stays indefinite after the
/// maximum regularization. Maps to exit code 3 in the command line tool.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The pointwise F ratio is undefined at one or more grid points
/// (between-condition variation present, residual variation exactly zero),
/// so integral- and supremum-type statistics of F cannot be formed.
class DegeneracyError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace frmanova
