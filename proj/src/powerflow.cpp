#include "rtopf/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "rtopf/errors.hpp"

namespace rtopf {

using Eigen::Index;
using Complex = std::complex<double>;

InjectionSpec make_injection(const Network& net, const VectorX<double>& demand_p,
                             const VectorX<double>& demand_q, const VectorX<double>& wind) {
  const auto n = static_cast<Index>(net.bus_count());
  if (demand_p.size() != n || demand_q.size() != n)
    throw ValidationError("demand vectors must have one entry per bus");
  if (wind.size() != static_cast<Index>(net.station_count()))
    throw ValidationError("wind vector must have one entry per station");
  InjectionSpec inj{-demand_p, -demand_q};
  for (std::size_t s = 0; s < net.stations.size(); ++s)
    inj.p(static_cast<Index>(Network::index_of(net.stations[s].bus))) += wind(static_cast<Index>(s));
  return inj;
}

PowerFlowModel::PowerFlowModel(const Network& net) : net_(net), y_(build_admittance<double>(net)) {
  for (Index i = 1; i < y_.rows(); ++i)
    for (Index k = 1; k < y_.cols(); ++k)
      if (i == k || y_(i, k) != Complex(0.0, 0.0)) links_.emplace_back(i, k);
}

PowerFlowSolution PowerFlowModel::solve(const InjectionSpec& inj, const PowerFlowOptions& opts) const {
  const Index n = y_.rows();
  const Index m = n - 1;  // every bus but the slack is pq
  if (inj.p.size() != n || inj.q.size() != n) throw ValidationError("injection must have one entry per bus");
  if (!(opts.tol > 0.0) || opts.max_iter < 1) throw ValidationError("power flow needs tol > 0 and max_iter >= 1");

  const double base = net_.base_mva;
  const VectorX<double> p_spec = inj.p.tail(m) / base;
  const VectorX<double> q_spec = inj.q.tail(m) / base;

  PowerFlowSolution sol;
  if (opts.warm_start) {
    sol.v = opts.warm_start->v;
    sol.theta = opts.warm_start->theta;
    if (sol.v.size() != n || sol.theta.size() != n) throw ValidationError("warm start has the wrong size");
  } else {
    sol.v = VectorX<double>::Ones(n);
    sol.theta = VectorX<double>::Zero(n);
  }
  sol.v(0) = Network::kSlackVoltage;
  sol.theta(0) = Network::kSlackAngle;

  VectorX<Complex> voltage(n);
  VectorX<double> mismatch(2 * m);
  VectorX<Complex> power(n);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(4 * links_.size());
  Eigen::SparseMatrix<double> jac(2 * m, 2 * m);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;

  auto evaluate = [&]() {
    for (Index i = 0; i < n; ++i) voltage(i) = std::polar(sol.v(i), sol.theta(i));
    power = voltage.cwiseProduct((y_ * voltage).conjugate());
    mismatch.head(m) = power.tail(m).real() - p_spec;
    mismatch.tail(m) = power.tail(m).imag() - q_spec;
  };

  double residual = std::numeric_limits<double>::infinity();
  for (int iter = 0;; ++iter) {
    evaluate();
    residual = mismatch.allFinite() ? mismatch.lpNorm<Eigen::Infinity>() : std::numeric_limits<double>::infinity();
    if (residual <= opts.tol) {
      sol.iterations = iter;
      sol.max_residual = residual;
      break;
    }
    if (iter >= opts.max_iter || !std::isfinite(residual) || residual > 1e10)
      throw NonConvergence(iter, residual);

    // Polar Jacobian over pq buses, unknowns ordered [theta; |V|].
    entries.clear();
    for (const auto& [i, k] : links_) {
      const double g = y_(i, k).real();
      const double b = y_(i, k).imag();
      const double vi = sol.v(i);
      const Index r = i - 1;
      const Index c = k - 1;
      if (i == k) {
        const double p = power(i).real();
        const double q = power(i).imag();
        entries.emplace_back(r, c, -q - b * vi * vi);
        entries.emplace_back(r, m + c, p / vi + g * vi);
        entries.emplace_back(m + r, c, p - g * vi * vi);
        entries.emplace_back(m + r, m + c, q / vi - b * vi);
      } else {
        const double vk = sol.v(k);
        const double ang = sol.theta(i) - sol.theta(k);
        const double gs_bc = g * std::sin(ang) - b * std::cos(ang);
        const double gc_bs = g * std::cos(ang) + b * std::sin(ang);
        entries.emplace_back(r, c, vi * vk * gs_bc);
        entries.emplace_back(r, m + c, vi * gc_bs);
        entries.emplace_back(m + r, c, -vi * vk * gc_bs);
        entries.emplace_back(m + r, m + c, vi * gs_bc);
      }
    }
    jac.setFromTriplets(entries.begin(), entries.end());
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) throw SingularJacobian(iter);
    const VectorX<double> step = lu.solve(-mismatch);
    if (!step.allFinite()) throw SingularJacobian(iter);
    sol.theta.tail(m) += step.head(m);
    sol.v.tail(m) += step.tail(m);
    // a collapsed voltage means the iteration has run away, typically past loadability
    if ((sol.v.tail(m).array() <= 0.0).any()) throw NonConvergence(iter + 1, residual);
  }

  finish(sol);
  return sol;
}

void PowerFlowModel::finish(PowerFlowSolution& sol) const {
  const Index n = y_.rows();
  const double base = net_.base_mva;
  VectorX<Complex> voltage(n);
  for (Index i = 0; i < n; ++i) voltage(i) = std::polar(sol.v(i), sol.theta(i));

  const Complex slack_current = y_.row(0).transpose().cwiseProduct(voltage).sum();
  const Complex slack = voltage(0) * std::conj(slack_current);
  sol.p_s = slack.real() * base;
  sol.q_s = slack.imag() * base;

  sol.flows.resize(static_cast<Index>(net_.branches.size()));
  Complex loss(0.0, 0.0);
  for (std::size_t k = 0; k < net_.branches.size(); ++k) {
    const Branch& br = net_.branches[k];
    const Complex vf = voltage(static_cast<Index>(Network::index_of(br.from_bus)));
    const Complex vt = voltage(static_cast<Index>(Network::index_of(br.to_bus)));
    const Complex series = 1.0 / Complex(br.resistance, br.reactance);
    const Complex half_shunt(0.0, br.shunt_susceptance_total / 2.0);
    const Complex s_from = vf * std::conj(series * (vf - vt) + half_shunt * vf);
    const Complex s_to = vt * std::conj(series * (vt - vf) + half_shunt * vt);
    sol.flows(static_cast<Index>(k)) = std::max(std::abs(s_from), std::abs(s_to)) * base;
    loss += s_from + s_to;
  }
  sol.p_loss = loss.real() * base;
  sol.q_loss = loss.imag() * base;
}

PowerFlowSolution solve_power_flow(const Network& net, const InjectionSpec& inj, const PowerFlowOptions& opts) {
  return PowerFlowModel(net).solve(inj, opts);
}

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::slack_apparent: return "slack_apparent";
    case ConstraintKind::slack_p_lower: return "slack_p_lower";
    case ConstraintKind::slack_p_upper: return "slack_p_upper";
    case ConstraintKind::slack_q_lower: return "slack_q_lower";
    case ConstraintKind::slack_q_upper: return "slack_q_upper";
    case ConstraintKind::voltage_lower: return "voltage_lower";
    case ConstraintKind::voltage_upper: return "voltage_upper";
    case ConstraintKind::branch_flow: return "branch_flow";
  }
  return "unknown";
}

int ConstraintReport::violation_count() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.violated; }));
}

double ConstraintReport::min_slack() const {
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) lowest = std::min(lowest, c.slack);
  return lowest;
}

std::vector<ConstraintCheck> ConstraintReport::violations() const {
  std::vector<ConstraintCheck> out;
  std::copy_if(checks.begin(), checks.end(), std::back_inserter(out), [](const auto& c) { return c.violated; });
  return out;
}

ConstraintReport check_limits(const Network& net, const PowerFlowSolution& sol, double tol) {
  ConstraintReport report;
  report.checks.reserve(5 + 2 * net.bus_count() + net.branches.size());
  auto add = [&](ConstraintKind kind, int element, double value, double bound, double slack) {
    report.checks.push_back({kind, element, value, bound, slack, slack < -tol});
  };

  const double s_mag = std::hypot(sol.p_s, sol.q_s);
  add(ConstraintKind::slack_apparent, 1, s_mag, net.s_s_max, net.s_s_max - s_mag);
  add(ConstraintKind::slack_p_lower, 1, sol.p_s, 0.0, sol.p_s);
  add(ConstraintKind::slack_p_upper, 1, sol.p_s, net.s_s_max, net.s_s_max - sol.p_s);
  add(ConstraintKind::slack_q_lower, 1, sol.q_s, 0.0, sol.q_s);
  add(ConstraintKind::slack_q_upper, 1, sol.q_s, net.s_s_max, net.s_s_max - sol.q_s);

  for (const Bus& b : net.buses) {
    if (b.kind == BusKind::slack) continue;
    const double v = sol.v(static_cast<Index>(Network::index_of(b.id)));
    add(ConstraintKind::voltage_lower, b.id, v, b.v_min, v - b.v_min);
    add(ConstraintKind::voltage_upper, b.id, v, b.v_max, b.v_max - v);
  }
  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    const double flow = sol.flows(static_cast<Index>(k));
    add(ConstraintKind::branch_flow, static_cast<int>(k), flow, net.branches[k].s_l_max,
        net.branches[k].s_l_max - flow);
  }
  return report;
}

}  // namespace rtopf
