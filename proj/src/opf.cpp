#include "rtopf/opf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/QR>

#include "json_util.hpp"
#include "rtopf/errors.hpp"

namespace rtopf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using detail::Json;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void validate(const Network& net, const HorizonInput& input) {
  const auto n = static_cast<Index>(net.bus_count());
  if (input.demand_p.size() != n || input.demand_q.size() != n)
    throw ValidationError("horizon input: demand vectors need one entry per bus");
  if (input.wind_available.size() != static_cast<Index>(net.station_count()))
    throw ValidationError("horizon input: wind_available needs one entry per station");
  for (Index i = 0; i < n; ++i) {
    if (!(input.demand_p(i) >= 0.0) || !(input.demand_q(i) >= 0.0) || !std::isfinite(input.demand_p(i)) ||
        !std::isfinite(input.demand_q(i)))
      throw ValidationError("horizon input: demand at bus " + std::to_string(i + 1) + " must be non-negative");
  }
  if (input.demand_p(0) != 0.0 || input.demand_q(0) != 0.0)
    throw ValidationError("horizon input: the slack bus carries no demand");
  for (std::size_t s = 0; s < net.stations.size(); ++s) {
    const double w = input.wind_available(static_cast<Index>(s));
    if (!(w >= 0.0 && w <= net.stations[s].rated_power))
      throw ValidationError("horizon input: wind at station bus " + std::to_string(net.stations[s].bus) +
                            " must lie in [0, rated_power]");
  }
  if (!(input.price_p >= 0.0) || !(input.price_q >= 0.0) || !std::isfinite(input.price_p) ||
      !std::isfinite(input.price_q))
    throw ValidationError("horizon input: prices must be non-negative");
}

namespace {

VectorXd parse_bus_map(const Network& net, const Json& j, const std::string& where) {
  detail::require_object(j, where);
  VectorXd out = VectorXd::Zero(static_cast<Index>(net.bus_count()));
  for (const auto& [key, value] : j.items()) {
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ParseError(where + ": key '" + key + "' is not a bus id");
    }
    if (id < 1 || id > static_cast<int>(net.bus_count()))
      throw ParseError(where + ": bus " + key + " does not exist");
    if (!value.is_number()) throw ParseError(where + "." + key + ": expected a number");
    out(static_cast<Index>(Network::index_of(id))) = value.get<double>();
  }
  return out;
}

}  // namespace

HorizonInput parse_horizon_input(const Network& net, const std::string& text) {
  const Json root = detail::parse_json(text, "horizon input");
  detail::require_object(root, "horizon");
  detail::reject_unknown(root, "horizon", {"demand_p", "demand_q", "wind_available", "price_p", "price_q"});
  HorizonInput in;
  in.demand_p = parse_bus_map(net, detail::field(root, "demand_p", "horizon"), "horizon.demand_p");
  in.demand_q = parse_bus_map(net, detail::field(root, "demand_q", "horizon"), "horizon.demand_q");
  const Json& wind = detail::array(root, "wind_available", "horizon");
  in.wind_available.resize(static_cast<Index>(wind.size()));
  for (std::size_t s = 0; s < wind.size(); ++s) {
    if (!wind[s].is_number()) throw ParseError("horizon.wind_available[" + std::to_string(s) + "]: expected a number");
    in.wind_available(static_cast<Index>(s)) = wind[s].get<double>();
  }
  in.price_p = detail::number_or(root, "price_p", "horizon", 1.67);
  in.price_q = detail::number_or(root, "price_q", "horizon", 0.4);
  validate(net, in);
  return in;
}

HorizonInput load_horizon_input(const Network& net, const std::filesystem::path& path) {
  return parse_horizon_input(net, detail::read_file(path));
}

std::string serialize_horizon_input(const Network& net, const HorizonInput& input) {
  Json p = Json::object();
  Json q = Json::object();
  for (const Bus& b : net.buses) {
    const auto i = static_cast<Index>(Network::index_of(b.id));
    if (input.demand_p(i) != 0.0 || input.demand_q(i) != 0.0) {
      p[std::to_string(b.id)] = input.demand_p(i);
      q[std::to_string(b.id)] = input.demand_q(i);
    }
  }
  Json wind = Json::array();
  for (Index s = 0; s < input.wind_available.size(); ++s) wind.push_back(input.wind_available(s));
  Json root = {{"demand_p", p}, {"demand_q", q}, {"wind_available", wind},
               {"price_p", input.price_p}, {"price_q", input.price_q}};
  return root.dump(2) + "\n";
}

HorizonInput scaled_peak_demand(const Network& net, double total_p, double total_q) {
  const auto n = static_cast<Index>(net.bus_count());
  HorizonInput in;
  in.demand_p = VectorXd::Zero(n);
  in.demand_q = VectorXd::Zero(n);
  for (const Bus& b : net.buses) {
    const auto i = static_cast<Index>(Network::index_of(b.id));
    in.demand_p(i) = b.demand_peak_p;
    in.demand_q(i) = b.demand_peak_q;
  }
  const double sum_p = in.demand_p.sum();
  const double sum_q = in.demand_q.sum();
  if (sum_p > 0.0) in.demand_p *= total_p / sum_p;
  if (sum_q > 0.0) in.demand_q *= total_q / sum_q;
  in.wind_available = VectorXd::Zero(static_cast<Index>(net.station_count()));
  return in;
}

ObjectiveTerms objective_terms(double price_p, double price_q, double wind_injected, double p_loss, double p_s,
                               double q_s) {
  ObjectiveTerms t;
  t.f1 = price_p * wind_injected;
  t.f2 = price_p * p_loss;
  t.f3 = price_p * p_s;
  t.f4 = price_q * q_s;
  t.f = t.f1 - t.f2 - t.f3 - t.f4;
  return t;
}

Evaluation evaluate_objective(const Network& net, const HorizonInput& input, const VectorXd& beta,
                              const PowerFlowOptions& pf, double tol_cons) {
  validate(net, input);
  if (beta.size() != input.wind_available.size()) throw ValidationError("beta needs one entry per station");
  for (Index s = 0; s < beta.size(); ++s)
    if (!(beta(s) >= 0.0 && beta(s) <= 1.0)) throw ValidationError("beta must lie in [0, 1]");
  const VectorXd wind = beta.cwiseProduct(input.wind_available);
  Evaluation ev;
  ev.flow = solve_power_flow(net, make_injection(net, input.demand_p, input.demand_q, wind), pf);
  ev.terms = objective_terms(input.price_p, input.price_q, wind.sum(), ev.flow.p_loss, ev.flow.p_s, ev.flow.q_s);
  ev.report = check_limits(net, ev.flow, tol_cons);
  return ev;
}

std::string to_string(OpfStatus status) {
  switch (status) {
    case OpfStatus::optimal: return "optimal";
    case OpfStatus::infeasible: return "infeasible";
    case OpfStatus::solver_failure: return "solver_failure";
  }
  return "unknown";
}

namespace {

// One evaluated candidate. `margins` holds every limit slack from check_limits
// followed by the box margins beta_i and 1 - beta_i.
struct Point {
  VectorXd beta;
  bool converged = false;
  bool feasible = false;
  double f = kNegInf;
  ObjectiveTerms terms;
  VectorXd margins;
  PowerFlowSolution flow;
};

struct Gradients {
  VectorXd objective;
  MatrixXd margins;  // rows: margins, cols: stations
};

VectorXd clamp_unit(VectorXd x) { return x.cwiseMax(0.0).cwiseMin(1.0); }

class Evaluator {
 public:
  Evaluator(const PowerFlowModel& model, const HorizonInput& input, const OpfOptions& opts)
      : model_(model), net_(model.network()), input_(input), opts_(opts) {}

  Point at(const VectorXd& beta, const Point* near = nullptr) {
    ++evals_;
    Point p;
    p.beta = beta;
    const VectorXd wind = beta.cwiseProduct(input_.wind_available);
    const InjectionSpec inj = make_injection(net_, input_.demand_p, input_.demand_q, wind);
    PowerFlowOptions pf = opts_.pf;
    if (near != nullptr && near->converged) pf.warm_start = near->flow.state();
    try {
      p.flow = model_.solve(inj, pf);
    } catch (const PowerFlowError&) {
      if (!pf.warm_start) return p;
      pf.warm_start.reset();
      try {
        p.flow = model_.solve(inj, pf);
      } catch (const PowerFlowError&) {
        return p;
      }
    }
    p.converged = true;
    const ConstraintReport report = check_limits(net_, p.flow, opts_.feasibility_tol);
    const auto k = static_cast<Index>(report.checks.size());
    const Index n = beta.size();
    p.margins.resize(k + 2 * n);
    for (Index i = 0; i < k; ++i) p.margins(i) = report.checks[static_cast<std::size_t>(i)].slack;
    p.margins.segment(k, n) = beta;
    p.margins.tail(n) = VectorXd::Ones(n) - beta;
    p.feasible = (p.margins.array() >= -opts_.feasibility_tol).all();
    p.terms = objective_terms(input_.price_p, input_.price_q, wind.sum(), p.flow.p_loss, p.flow.p_s, p.flow.q_s);
    p.f = p.feasible ? p.terms.f : kNegInf;
    return p;
  }

  // Forward differences, stepping inward at the upper box edge.
  bool gradients(const Point& p, Gradients& g) {
    const Index n = p.beta.size();
    g.objective.resize(n);
    g.margins.resize(p.margins.size(), n);
    for (Index i = 0; i < n; ++i) {
      const double h = p.beta(i) + kFdStep <= 1.0 ? kFdStep : -kFdStep;
      VectorXd shifted = p.beta;
      shifted(i) += h;
      const Point q = at(shifted, &p);
      if (!q.converged) return false;
      g.objective(i) = (q.terms.f - p.terms.f) / h;
      g.margins.col(i) = (q.margins - p.margins) / h;
    }
    return true;
  }

  bool exhausted() const { return evals_ >= opts_.max_evals; }
  int evaluations() const { return evals_; }
  const OpfOptions& options() const { return opts_; }

 private:
  static constexpr double kFdStep = 1e-6;

  const PowerFlowModel& model_;
  const Network& net_;
  const HorizonInput& input_;
  const OpfOptions& opts_;
  int evals_ = 0;
};

// Min-norm step s with rows(s) = target, solved in the least-squares sense when
// the rows are dependent or outnumber the stations.
VectorXd min_norm_step(const MatrixXd& rows, const VectorXd& target) {
  return rows.completeOrthogonalDecomposition().solve(target);
}

// Pulls an infeasible trial point back onto the feasible set along the
// gradients (taken at the base point) of its violated limits.
bool restore(Evaluator& ev, Point& y, const Gradients& g, int max_steps = 6) {
  constexpr double kTarget = 1e-9;
  const double tol = ev.options().feasibility_tol;
  const Index n = y.beta.size();
  const Index box_start = y.margins.size() - 2 * n;
  for (int step = 0; step < max_steps && !ev.exhausted(); ++step) {
    if (!y.converged) return false;
    if (y.feasible) return true;
    std::vector<Index> rows;
    for (Index k = 0; k < y.margins.size(); ++k) {
      const bool violated = y.margins(k) < 0.0;
      const bool pinned_box = k >= box_start && y.margins(k) <= 1e-12;
      if (violated || pinned_box) rows.push_back(k);
    }
    MatrixXd a(static_cast<Index>(rows.size()), n);
    VectorXd r(static_cast<Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const Index k = rows[j];
      a.row(static_cast<Index>(j)) = g.margins.row(k);
      r(static_cast<Index>(j)) = (k >= box_start ? 0.0 : kTarget) - y.margins(k);
    }
    const VectorXd s = min_norm_step(a, r);
    if (!s.allFinite() || s.lpNorm<Eigen::Infinity>() == 0.0) return false;
    y = ev.at(clamp_unit(y.beta + s), &y);
  }
  return y.converged && y.margins.minCoeff() >= -tol;
}

// Projected ascent direction: the objective gradient with the components that
// push into blocking limits removed. Limits are treated as blocking while their
// multiplier is non-negative. Also returns the Newton correction that moves the
// blocking limits onto their boundary.
constexpr double kActiveReach = 1e-3;

struct Direction {
  VectorXd d;
  VectorXd correction;
  std::vector<Index> active;
};

Direction ascent_direction(const Point& p, const Gradients& g, double step) {
  const Index n = p.beta.size();
  std::vector<Index> active;
  for (Index k = 0; k < p.margins.size(); ++k) {
    const double reach = std::min(step, kActiveReach) * g.margins.row(k).lpNorm<1>();
    if (p.margins(k) <= std::max(reach, 1e-12)) active.push_back(k);
  }
  VectorXd d = g.objective;
  MatrixXd a;
  while (!active.empty()) {
    a.resize(static_cast<Index>(active.size()), n);
    for (std::size_t j = 0; j < active.size(); ++j) a.row(static_cast<Index>(j)) = g.margins.row(active[j]);
    const VectorXd lambda = a.transpose().completeOrthogonalDecomposition().solve(-g.objective);
    Index worst = -1;
    double worst_value = -1e-12 * std::max(1.0, g.objective.norm());
    for (Index j = 0; j < lambda.size(); ++j) {
      if (lambda(j) < worst_value) {
        worst_value = lambda(j);
        worst = j;
      }
    }
    if (worst < 0) {
      d = g.objective + a.transpose() * lambda;
      break;
    }
    active.erase(active.begin() + worst);
  }
  VectorXd correction = VectorXd::Zero(n);
  if (!active.empty()) {
    VectorXd r(static_cast<Index>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j) {
      const Index k = active[j];
      const bool box = k >= p.margins.size() - 2 * n;
      r(static_cast<Index>(j)) = (box ? 0.0 : 1e-9) - p.margins(k);
    }
    correction = min_norm_step(a, r);
    if (!correction.allFinite()) correction.setZero();
    if (d.norm() <= 1e-12 * std::max(1.0, g.objective.norm())) d.setZero();
  }
  return {d, correction, active};
}

// A tangent step along curved blocking limits drifts away from them. One Newton
// step on those limits puts the trial point back on the boundary it follows.
void retract(Evaluator& ev, Point& y, const Gradients& g, const std::vector<Index>& active) {
  if (!y.feasible) return;
  const Index n = y.beta.size();
  const Index box_start = y.margins.size() - 2 * n;
  bool drifted = false;
  for (Index k : active) drifted = drifted || (k < box_start && y.margins(k) > 1e-8);
  if (!drifted) return;
  MatrixXd a(static_cast<Index>(active.size()), n);
  VectorXd r(static_cast<Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) {
    const Index k = active[j];
    a.row(static_cast<Index>(j)) = g.margins.row(k);
    r(static_cast<Index>(j)) = (k >= box_start ? 0.0 : 1e-9) - y.margins(k);
  }
  const VectorXd s = min_norm_step(a, r);
  if (!s.allFinite()) return;
  Point z = ev.at(clamp_unit(y.beta + s), &y);
  if (z.converged && !z.feasible) restore(ev, z, g, 2);
  if (z.feasible && z.f > y.f) y = std::move(z);
}

Point local_search(Evaluator& ev, Point x, const std::vector<Point>& known = {}) {
  constexpr double kMinStep = 1e-7;
  constexpr double kMergeRadius = 5e-2;
  const double tol_obj = ev.options().tol_obj;
  double step = 0.1;
  Gradients g;
  while (!ev.exhausted()) {
    // A start that runs into the basin of an earlier optimum stops there.
    for (const Point& k : known)
      if ((k.beta - x.beta).lpNorm<Eigen::Infinity>() < kMergeRadius && x.f <= k.f) return x;
    if (!ev.gradients(x, g)) break;
    const auto [d, correction, active] = ascent_direction(x, g, step);
    const double d_norm = d.norm();
    const VectorXd unit = d_norm > 0.0 ? VectorXd(d / d_norm) : VectorXd::Zero(d.size());
    if (d_norm == 0.0 && correction.lpNorm<Eigen::Infinity>() < 1e-12) break;

    bool moved = false;
    const double slope = g.objective.dot(unit);
    // Longest step that stays inside the box; clamping beyond it bends the path.
    double t_box = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < unit.size(); ++i) {
      if (unit(i) > 1e-12) t_box = std::min(t_box, (1.0 - x.beta(i)) / unit(i));
      if (unit(i) < -1e-12) t_box = std::min(t_box, -x.beta(i) / unit(i));
    }
    double t = step;
    if (t_box >= kMinStep && t > t_box) t = t_box;
    while (t >= kMinStep && !ev.exhausted()) {
      // Stop once the first-order gain of the step is below the objective tolerance.
      if (d_norm > 0.0 && t * slope < tol_obj && correction.lpNorm<Eigen::Infinity>() < 1e-12) break;
      Point y = ev.at(clamp_unit(x.beta + t * unit + correction), &x);
      if (y.converged && !y.feasible) restore(ev, y, g, 4);
      if (d_norm > 0.0) retract(ev, y, g, active);
      if (y.feasible && y.f > x.f + tol_obj) {
        x = std::move(y);
        step = std::min(2.0 * t, 0.5);
        moved = true;
        break;
      }
      if (d_norm == 0.0) break;
      // Overshoot: jump to the maximizer of the quadratic through f(0), f'(0) and f(t).
      double next = 0.25 * t;
      const double curvature = slope * t - (y.f - x.f);
      if (y.feasible && slope > 0.0 && curvature > 0.0)
        next = std::clamp(slope * t * t / (2.0 * curvature), 0.1 * t, 0.5 * t);
      t = next;
    }
    if (!moved) break;
  }
  return x;
}

// Lexicographic walk over a per-station grid, station 0 most significant.
template <typename Visit>
void for_each_grid_point(const VectorXd& lo, const VectorXd& hi, int points, Visit&& visit) {
  const Index n = lo.size();
  std::vector<int> digit(static_cast<std::size_t>(n), 0);
  VectorXd beta(n);
  while (true) {
    for (Index i = 0; i < n; ++i) {
      const double frac = points > 1 ? static_cast<double>(digit[static_cast<std::size_t>(i)]) / (points - 1) : 0.0;
      beta(i) = digit[static_cast<std::size_t>(i)] == points - 1 ? hi(i) : lo(i) + (hi(i) - lo(i)) * frac;
    }
    if (!visit(beta)) return;
    Index i = n - 1;
    for (; i >= 0; --i) {
      if (++digit[static_cast<std::size_t>(i)] < points) break;
      digit[static_cast<std::size_t>(i)] = 0;
    }
    if (i < 0) return;
  }
}

// Best feasible grid point; ties keep the first visited.
bool scan_grid(Evaluator& ev, const VectorXd& lo, const VectorXd& hi, int points, Point& best) {
  bool found = best.feasible;
  Point prev;
  for_each_grid_point(lo, hi, points, [&](const VectorXd& beta) {
    if (ev.exhausted()) return false;
    Point p = ev.at(beta, prev.converged ? &prev : (best.converged ? &best : nullptr));
    if (p.feasible && (!found || p.f > best.f)) {
      best = p;
      found = true;
    }
    if (p.converged) prev = std::move(p);
    return true;
  });
  return found;
}

double grid_size(Index stations, int points) { return std::pow(static_cast<double>(points), static_cast<double>(stations)); }

OPFSolution to_solution(const Point& p, OpfStatus status, int evals) {
  OPFSolution s;
  s.beta = p.beta;
  s.status = status;
  s.evaluations = evals;
  if (p.converged) {
    s.p_s = p.flow.p_s;
    s.q_s = p.flow.q_s;
    s.p_loss = p.flow.p_loss;
    s.terms = p.terms;
    s.flow = p.flow;
  }
  return s;
}

}  // namespace

OPFSolution solve_opf(const PowerFlowModel& model, const HorizonInput& input, const OpfOptions& opts) {
  const Network& net = model.network();
  validate(net, input);
  const Index n = static_cast<Index>(net.station_count());
  Evaluator ev(model, input, opts);
  const VectorXd ones = VectorXd::Ones(n);
  const VectorXd zeros = VectorXd::Zero(n);

  // Objective independent of beta (or identically zero): beta = 1 if it is feasible.
  const bool no_wind = input.wind_available.isZero(0.0);
  const bool no_prices = input.price_p == 0.0 && input.price_q == 0.0;
  if (no_wind || no_prices) {
    const Point p = ev.at(ones);
    if (p.feasible) return to_solution(p, OpfStatus::optimal, ev.evaluations());
    if (no_wind) {
      OPFSolution s = to_solution(p, p.converged ? OpfStatus::infeasible : OpfStatus::solver_failure, ev.evaluations());
      s.diagnostic = p.converged ? "demand-only operating point violates limits" : "power flow does not converge";
      return s;
    }
  }

  Point coarse;
  scan_grid(ev, zeros, ones, std::max(2, opts.coarse_points), coarse);

  std::vector<VectorXd> seeds;
  if (coarse.feasible) seeds.push_back(coarse.beta);
  seeds.push_back(ones);
  seeds.push_back(zeros);

  Point best;
  Gradients g;
  std::vector<Point> optima;
  for (const VectorXd& seed : seeds) {
    if (ev.exhausted()) break;
    Point start = coarse.feasible && seed == coarse.beta ? coarse : ev.at(seed, coarse.converged ? &coarse : nullptr);
    if (start.converged && !start.feasible && ev.gradients(start, g)) restore(ev, start, g);
    if (!start.feasible) continue;
    Point local = local_search(ev, std::move(start), optima);
    optima.push_back(local);
    if (!best.feasible || local.f > best.f) best = std::move(local);
  }

  if (!best.feasible) {
    // Certify infeasibility on the fine grid when it is affordable.
    constexpr int kCertifyPoints = 101;
    if (grid_size(n, kCertifyPoints) > static_cast<double>(opts.max_evals - ev.evaluations())) {
      OPFSolution s = to_solution(best, OpfStatus::solver_failure, ev.evaluations());
      s.beta = ones;
      s.diagnostic = "no feasible point found and the certification grid exceeds max_evals";
      return s;
    }
    Point found;
    if (!scan_grid(ev, zeros, ones, kCertifyPoints, found)) {
      OPFSolution s = to_solution(found, OpfStatus::infeasible, ev.evaluations());
      s.beta = ones;
      s.diagnostic = "no violation-free point on the 101-point certification grid";
      return s;
    }
    best = local_search(ev, std::move(found));
  }

  OPFSolution sol = to_solution(best, OpfStatus::optimal, ev.evaluations());
  const ConstraintReport report = check_limits(net, best.flow, opts.tol_cons);
  if (!report.feasible()) {
    sol.status = OpfStatus::solver_failure;
    sol.diagnostic = "final point violates " + std::to_string(report.violation_count()) + " limits";
  } else if (ev.exhausted()) {
    sol.diagnostic = "evaluation budget reached";
  }
  return sol;
}

OPFSolution solve_opf(const Network& net, const HorizonInput& input, const OpfOptions& opts) {
  return solve_opf(PowerFlowModel(net), input, opts);
}

OPFSolution oracle_opf(const PowerFlowModel& model, const HorizonInput& input, int grid_points, int refinements,
                       const OpfOptions& opts) {
  const Network& net = model.network();
  validate(net, input);
  if (grid_points < 2) throw ValidationError("oracle needs at least 2 grid points per station");
  const Index n = static_cast<Index>(net.station_count());
  OpfOptions unlimited = opts;
  unlimited.max_evals = std::numeric_limits<int>::max();
  Evaluator ev(model, input, unlimited);

  VectorXd lo = VectorXd::Zero(n);
  VectorXd hi = VectorXd::Ones(n);
  Point best;
  if (!scan_grid(ev, lo, hi, grid_points, best)) {
    OPFSolution s = to_solution(best, OpfStatus::infeasible, ev.evaluations());
    s.beta = VectorXd::Ones(n);
    s.diagnostic = "every grid point violates limits or diverges";
    return s;
  }
  for (int r = 0; r < refinements; ++r) {
    const VectorXd width = (hi - lo) / 10.0;
    for (Index i = 0; i < n; ++i) {
      double a = best.beta(i) - width(i) / 2.0;
      double b = best.beta(i) + width(i) / 2.0;
      if (a < 0.0) {
        a = 0.0;
        b = width(i);
      }
      if (b > 1.0) {
        b = 1.0;
        a = 1.0 - width(i);
      }
      lo(i) = a;
      hi(i) = b;
    }
    scan_grid(ev, lo, hi, grid_points, best);
  }
  return to_solution(best, OpfStatus::optimal, ev.evaluations());
}

OPFSolution oracle_opf(const Network& net, const HorizonInput& input, int grid_points, int refinements,
                       const OpfOptions& opts) {
  return oracle_opf(PowerFlowModel(net), input, grid_points, refinements, opts);
}

}  // namespace rtopf
