#pragma once

#include <stdexcept>
#include <string>

namespace calr {

// Bad input: malformed files, violated preconditions, dimension mismatches.
// The CLI maps these to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The data or parameters do not satisfy an algorithm's assumptions
// (not separable, sampling budget exhausted, ...). CLI exit code 2.
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace calr
