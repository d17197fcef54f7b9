#pragma once

#include <stdexcept>
#include <string>

namespace laughlin {

// Coincident particles (or a particle sitting exactly on a quasi-hole).
// Raised as a distinct type so samplers can reject the move and line
// searches can backtrack, instead of treating the state as "weight zero".
class SingularConfiguration : public std::runtime_error {
 public:
  explicit SingularConfiguration(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solve ran out of iterations before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations(iterations), residual(residual) {}
  int iterations;
  double residual;
};

}  // namespace laughlin
