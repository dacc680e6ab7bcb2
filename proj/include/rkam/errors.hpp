#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rkam {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied parameters (schedule constants, config values, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of an operation (negative radius, |y| > r, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operands with incompatible dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An exact zero divisor <k, omega> + j = 0 was found during certification.
class ResonanceError : public ParameterError {
 public:
  ResonanceError(std::vector<int> k, long j, const std::string& what)
      : ParameterError(what), k_(std::move(k)), j_(j) {}
  const std::vector<int>& k() const { return k_; }
  long j() const { return j_; }

 private:
  std::vector<int> k_;
  long j_;
};

// A retained mode has a divisor below the certified floor.
class SmallDivisorError : public Error {
 public:
  SmallDivisorError(std::vector<int> k, int l, double divisor,
                    const std::string& what)
      : Error(what), k_(std::move(k)), l_(l), divisor_(divisor) {}
  const std::vector<int>& k() const { return k_; }
  int l() const { return l_; }
  double divisor() const { return divisor_; }

 private:
  std::vector<int> k_;
  int l_;
  double divisor_;
};

// Input violates a structural assumption (reversibility, zero mean, ...).
class StructureError : public Error {
 public:
  using Error::Error;
};

// A Newton step could not be completed (inversion did not contract, ...).
class StepFailure : public Error {
 public:
  using Error::Error;
};

// Time integration could not proceed (implicit stages did not converge, ...).
class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

// File system failures.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input document; carries field context in the message.
class ParseError : public IoError {
 public:
  using IoError::IoError;
};

// Document parsed but violates a data invariant (parity tag, reality, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace rkam
