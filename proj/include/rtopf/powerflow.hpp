#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rtopf/network.hpp"

namespace rtopf {

/// Specified net injections per bus (generation minus demand), MW and Mvar.
/// The slack entry is ignored: the slack bus balances the network.
struct InjectionSpec {
  VectorX<double> p;
  VectorX<double> q;
};

/// Builds net injections from per-bus demand (N entries) and per-station wind
/// injection (one entry per station, already curtailed). Wind enters at unity power factor.
InjectionSpec make_injection(const Network& net, const VectorX<double>& demand_p,
                             const VectorX<double>& demand_q, const VectorX<double>& wind);

struct VoltageState {
  VectorX<double> v;      // pu
  VectorX<double> theta;  // rad
};

struct PowerFlowSolution {
  VectorX<double> v;
  VectorX<double> theta;
  double p_s = 0.0;     // MW into the network at the slack bus
  double q_s = 0.0;     // Mvar
  double p_loss = 0.0;  // MW, summed over branches
  double q_loss = 0.0;  // Mvar, series losses net of line charging
  VectorX<double> flows;  // MVA per branch, larger of the two ends
  int iterations = 0;
  double max_residual = 0.0;  // pu

  VoltageState state() const { return {v, theta}; }
};

struct PowerFlowOptions {
  double tol = 1e-10;  // pu mismatch; tight enough that the balance identity closes to 1e-8 MW
  int max_iter = 50;
  std::optional<VoltageState> warm_start;  // flat start when empty
};

/**
 * Polar power-mismatch terms S = V .* conj(Y V), in per-unit.
 */
template <typename Scalar>
VectorX<std::complex<Scalar>> bus_power(const AdmittanceMatrix<Scalar>& y, const VectorX<Scalar>& v,
                                        const VectorX<Scalar>& theta) {
  using Complex = std::complex<Scalar>;
  VectorX<Complex> voltage(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) voltage(i) = std::polar(v(i), theta(i));
  return voltage.cwiseProduct((y * voltage).conjugate());
}

/**
 * Newton-Raphson solver bound to one network. Holds the admittance matrix so the
 * OPF can call it thousands of times without rebuilding it. Immutable after
 * construction; `solve` is safe to call concurrently.
 */
class PowerFlowModel {
 public:
  explicit PowerFlowModel(const Network& net);

  PowerFlowSolution solve(const InjectionSpec& inj, const PowerFlowOptions& opts = {}) const;

  const Network& network() const { return net_; }
  const AdmittanceMatrix<double>& admittance() const { return y_; }

 private:
  void finish(PowerFlowSolution& sol) const;

  Network net_;
  AdmittanceMatrix<double> y_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> links_;  // nonzero pq-pq admittance entries
};

/// Throws NonConvergence or SingularJacobian.
PowerFlowSolution solve_power_flow(const Network& net, const InjectionSpec& inj,
                                   const PowerFlowOptions& opts = {});

enum class ConstraintKind {
  slack_apparent,
  slack_p_lower,
  slack_p_upper,
  slack_q_lower,
  slack_q_upper,
  voltage_lower,
  voltage_upper,
  branch_flow,
};

std::string to_string(ConstraintKind kind);

struct ConstraintCheck {
  ConstraintKind kind;
  int element = 0;  // bus id for voltage checks, branch position for flows, 1 for slack checks
  double value = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // >= 0 when satisfied, in the unit of `value`
  bool violated = false;
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;

  int violation_count() const;
  double min_slack() const;
  bool feasible() const { return violation_count() == 0; }
  std::vector<ConstraintCheck> violations() const;
};

/// Slack-bus apparent/active/reactive bounds, pq-bus voltage bounds and branch
/// thermal limits. A check is violated when its slack is below -tol.
ConstraintReport check_limits(const Network& net, const PowerFlowSolution& sol, double tol = 1e-6);

}  // namespace rtopf
