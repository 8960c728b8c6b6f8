#pragma once

#include <stdexcept>
#include <string>

namespace freqmux {

// Base for every failure raised by the library. Callers that do not care
// about the specific condition can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition on an argument was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Grid does not cover the envelope; results would carry truncation bias.
class GridTooNarrowError : public Error {
 public:
  using Error::Error;
};

// A spectral window removed all amplitude.
class ZeroOverlapError : public Error {
 public:
  using Error::Error;
};

// Filter removes (almost) all amplitude of a conditional wavepacket.
class VacuousEventError : public Error {
 public:
  using Error::Error;
};

// Bayes inversion with zero evidence for the observed outcome.
class ZeroEvidenceError : public Error {
 public:
  using Error::Error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// |V0| exceeds the modulator drive limit.
class OverdriveError : public Error {
 public:
  using Error::Error;
};

// Linear algebra failed to converge (SVD, eigen-decomposition).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Quadrature refinement changed the result by more than its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double change)
      : Error(what), change_(change) {}
  double change() const noexcept { return change_; }

 private:
  double change_;
};

// Scenario configuration rejected; message carries "section.key: reason".
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace freqmux
