#pragma once

#include <stdexcept>
#include <string>

namespace invasion {

// Thrown when a requested computation exceeds a hard size/budget cap
// (full-chain enumeration, dense spectra, state-space construction).
class SizeCapError : public std::runtime_error {
 public:
  explicit SizeCapError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iterative solver exhausts its iteration budget before
// reaching the requested residual, or an estimator ends with no usable data.
class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace invasion
