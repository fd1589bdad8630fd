#pragma once

#include <stdexcept>
#include <string>

namespace cheq {

/// Bad input: wrong dimensions, zero vectors, points of the wrong signature.
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix that does not describe an element of PU(1,n).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a result within its tolerance.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Decision quantities sit too close to their thresholds to answer.
class IllConditioned : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Operation called outside its documented domain (e.g. missing limit data).
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace cheq
