#pragma once

#include <stdexcept>
#include <string>

namespace lhr {

// Inconsistent dimensions or settings; the model cannot be built or run as configured.
class ConfigError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Arguments violate an operation's precondition (empty sequence, bad index, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// API called in the wrong order, e.g. backward before any forward pass.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed input file; the message carries file and line.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN or infinity reached the optimizer.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lhr
