#pragma once

#include <stdexcept>
#include <string>

namespace lsm {

/// Input data failed validation (malformed file, non-binary entry, shape mismatch).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine could not produce a usable result.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace lsm
