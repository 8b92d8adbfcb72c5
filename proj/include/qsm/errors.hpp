#pragma once

#include <stdexcept>
#include <string>

namespace qsm {

// Parameter or flag outside the documented domain.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested size above a hard cap (Toeplitz order, ED chain length, ...).
class CapExceeded : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionCap : public CapExceeded {
 public:
  using CapExceeded::CapExceeded;
};

// Base for failures of a numerical procedure on otherwise valid input.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericError {
 public:
  using NumericError::NumericError;
};

class BracketError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace qsm
