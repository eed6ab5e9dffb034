#pragma once

#include <stdexcept>
#include <string>

namespace geodiff {

// Malformed or inconsistent input: files, documents, configuration values.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A patch, point or projection that falls outside the grid or image it refers to.
class BoundsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf produced where a finite value is required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace geodiff
