#pragma once

#include <stdexcept>
#include <string>

namespace ifsshadow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(int expected, int got);
};

// Shortest torus path between two points is not unique (some coordinate
// difference is exactly one half).
class AntipodalAmbiguity : public Error {
 public:
  using Error::Error;
};

class NotInvertible : public Error {
 public:
  using Error::Error;
};

// Iterative solve stopped without meeting its tolerance. best_residual is the
// smallest residual seen.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual, int iterations)
      : Error(what), best_residual_(best_residual), iterations_(iterations) {}
  double best_residual() const { return best_residual_; }
  int iterations() const { return iterations_; }

 private:
  double best_residual_;
  int iterations_;
};

class NotContracting : public Error {
 public:
  NotContracting(const std::string& label, double lipschitz);
  double lipschitz() const { return lipschitz_; }

 private:
  double lipschitz_;
};

class NotHyperbolic : public Error {
 public:
  using Error::Error;
};

// A construction cannot meet its geometric constraints at the requested scale.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ifsshadow
