#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nsmooth {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inner maximization did not reach its tolerance; carries the last residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A chain left the finite region. `step` is the iteration at which it was detected.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, double norm)
      : std::runtime_error("chain diverged at step " + std::to_string(step) +
                           " (|x| = " + std::to_string(norm) + ")"),
        step_(step),
        norm_(norm) {}
  std::size_t step() const noexcept { return step_; }
  double norm() const noexcept { return norm_; }

 private:
  std::size_t step_;
  double norm_;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace nsmooth
