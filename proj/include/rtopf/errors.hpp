#pragma once

#include <stdexcept>
#include <string>

namespace rtopf {

/// Malformed input file: bad JSON, wrong type, unknown or missing field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input parsed but violates a model invariant (two slack buses, negative demand, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PowerFlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public PowerFlowError {
 public:
  NonConvergence(int iterations, double final_residual)
      : PowerFlowError("power flow did not converge after " + std::to_string(iterations) +
                       " iterations (residual " + std::to_string(final_residual) + " pu)"),
        iterations_(iterations),
        final_residual_(final_residual) {}

  int iterations() const { return iterations_; }
  double final_residual() const { return final_residual_; }

 private:
  int iterations_;
  double final_residual_;
};

class SingularJacobian : public PowerFlowError {
 public:
  explicit SingularJacobian(int iteration)
      : PowerFlowError("singular Jacobian at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace rtopf
