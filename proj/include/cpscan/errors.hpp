#pragma once

#include <stdexcept>
#include <string>

namespace cpscan {

// Bad caller input: empty samples, series shorter than 2b, out-of-range
// parameters.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input that is well formed but carries no information for the requested
// statistic (e.g. a constant series for the Gaussian likelihood ratio).
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed null file or series file. Messages name the offending line.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A null distribution was requested for a series/configuration it was not
// generated for.
class MismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejection sampling in the coverage study ran out of attempts.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cpscan
