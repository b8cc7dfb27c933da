#pragma once

#include <stdexcept>
#include <string>

namespace supersat {

/// Malformed or inconsistent input (bad dimensions, unparsable files, invalid
/// parameters). The CLI maps these to exit code 2.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public InputError {
public:
  using InputError::InputError;
};

class UnsortedOrDuplicateKnots : public InputError {
public:
  using InputError::InputError;
};

/// A numerical precondition failed. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One of the block-system conditions failed: (i) X full row rank,
/// (ii) X0 full column rank, (iii) K~ invertible.
class SingularSystem : public NumericalError {
public:
  SingularSystem(int condition, double singular_value, const std::string& what)
      : NumericalError(what), condition_(condition), singular_value_(singular_value) {}

  /// 1, 2 or 3 for the failing condition; 0 for a singular assembled system.
  int condition() const { return condition_; }
  /// Offending relative singular value.
  double singular_value() const { return singular_value_; }

private:
  int condition_;
  double singular_value_;
};

class KSingular : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class BadDummyDesign : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class RankDeficientObservations : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class CollinearCenters : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NonUnimodal : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace supersat
