#pragma once

#include <stdexcept>
#include <string>

namespace latentstab {

// Base for bad user input (CLI exit code 2).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Base for numerical failures (CLI exit code 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConstantColumn : InputError {
  using InputError::InputError;
};
struct NonFinite : NumericalError {
  using NumericalError::NumericalError;
};
struct NotPositiveDefinite : InputError {
  using InputError::InputError;
};
struct ParseError : InputError {
  using InputError::InputError;
};
struct RaggedRows : InputError {
  using InputError::InputError;
};
struct UnknownLabelColumn : InputError {
  using InputError::InputError;
};
struct Diverged : NumericalError {
  using NumericalError::NumericalError;
};
struct DegenerateAxis : NumericalError {
  using NumericalError::NumericalError;
};
struct TooFewSamples : InputError {
  using InputError::InputError;
};
struct Infeasible : NumericalError {
  using NumericalError::NumericalError;
};
struct LengthMismatch : InputError {
  using InputError::InputError;
};
struct TooFewPoints : InputError {
  using InputError::InputError;
};
struct EmptySet : InputError {
  using InputError::InputError;
};
struct ZeroDenominator : NumericalError {
  using NumericalError::NumericalError;
};
struct Degenerate : NumericalError {
  using NumericalError::NumericalError;
};
struct NoConvergence : NumericalError {
  using NumericalError::NumericalError;
};
struct SingularCovariance : NumericalError {
  using NumericalError::NumericalError;
};
struct NoRegions : NumericalError {
  using NumericalError::NumericalError;
};
struct EmptyList : InputError {
  using InputError::InputError;
};
struct ZeroBaseline : NumericalError {
  using NumericalError::NumericalError;
};
struct IndexOutOfRange : InputError {
  using InputError::InputError;
};
struct NegativeValue : InputError {
  using InputError::InputError;
};
struct IoError : InputError {
  using InputError::InputError;
};

}  // namespace latentstab
