#pragma once

#include <stdexcept>
#include <string>

namespace descspace {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Training aborted because the loss became non-finite or the information
/// constraint stayed unreachable for too long.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step)
      : Error(what), step(step) {}
  long step;
};

/// Hardening did not drive every pairwise coefficient to 0 or 1 in time.
class HardenError : public Error {
 public:
  HardenError(const std::string& what, int component, int outcome_a,
              int outcome_b, double coefficient)
      : Error(what),
        component(component),
        outcome_a(outcome_a),
        outcome_b(outcome_b),
        coefficient(coefficient) {}
  int component;
  int outcome_a;
  int outcome_b;
  double coefficient;
};

}  // namespace descspace
