#pragma once

#include <stdexcept>
#include <string>

namespace noonsim {

// Bad input: malformed configuration, unknown modes, photon-number mismatch.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnitarityError : public ValidationError {
 public:
  UnitarityError(const std::string& what, double deviation)
      : ValidationError(what), deviation_(deviation) {}

  // max |(M M^dagger - I)_ij|
  double deviation() const { return deviation_; }

 private:
  double deviation_;
};

class PhotonNumberError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numerical failure: quadrature non-convergence, singular fit.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace noonsim
