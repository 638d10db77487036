#pragma once

#include <stdexcept>
#include <string>

namespace qclone {

// Requested object would exceed a configured size cap.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative routine failed to converge, or a computed result violated
// its residual bound. Carries the offending residual.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace qclone
