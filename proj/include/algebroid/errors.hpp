#pragma once

#include <stdexcept>
#include <string>

namespace algebroid {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation requested outside the chart box.
struct OutOfChartError : Error {
  using Error::Error;
};

// Non-finite values or failed linear algebra.
struct NumericError : Error {
  using Error::Error;
};

// Invalid model data: non-SPD cometric, broken antisymmetry, bad shapes.
struct ModelError : Error {
  using Error::Error;
};

// A derivative was requested, no analytic rule is available, and finite
// differences are disabled for the field.
struct CapabilityError : Error {
  using Error::Error;
};

// Operation called outside its stated domain of use.
struct PreconditionError : Error {
  using Error::Error;
};

// Adaptive integrator could not honour the tolerance above dt_min.
struct StiffnessError : Error {
  using Error::Error;
};

// Expression, model-file or command-line syntax.
struct ParseError : Error {
  using Error::Error;
};

// A trajectory left the chart box before t_final.
struct TrajectoryEscapeError : Error {
  double exit_time;
  TrajectoryEscapeError(const std::string& msg, double t)
      : Error(msg), exit_time(t) {}
};

}  // namespace algebroid
