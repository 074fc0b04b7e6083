#pragma once

#include <stdexcept>
#include <string>

namespace lef {

/// Group/domain pair violating the orbit-size hypothesis.
class AdmissibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method (ODE shooting, linear or eigen solver, Newton) failed
/// to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lef
