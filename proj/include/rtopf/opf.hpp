#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "rtopf/network.hpp"
#include "rtopf/powerflow.hpp"

namespace rtopf {

/// Operating conditions of one prediction horizon.
struct HorizonInput {
  VectorX<double> demand_p;        // MW per bus, zero outside the demand-bus set
  VectorX<double> demand_q;        // Mvar per bus
  VectorX<double> wind_available;  // MW per station
  double price_p = 1.67;  // $/MW per horizon
  double price_q = 0.4;   // $/Mvar per horizon
};

void validate(const Network& net, const HorizonInput& input);

/// JSON horizon file: {"demand_p": {"<bus id>": MW, ...}, "demand_q": {...},
/// "wind_available": [MW per station], "price_p": $, "price_q": $}.
HorizonInput parse_horizon_input(const Network& net, const std::string& text);
HorizonInput load_horizon_input(const Network& net, const std::filesystem::path& path);
std::string serialize_horizon_input(const Network& net, const HorizonInput& input);

/// Peak demand of every bus scaled so the totals hit the requested MW/Mvar.
HorizonInput scaled_peak_demand(const Network& net, double total_p, double total_q);

/// Objective decomposition, all in $ for the interval the prices refer to.
struct ObjectiveTerms {
  double f = 0.0;
  double f1 = 0.0;  // wind revenue
  double f2 = 0.0;  // loss cost
  double f3 = 0.0;  // slack active import cost
  double f4 = 0.0;  // slack reactive import cost
};

/// f1 = price_p * wind, f2 = price_p * loss, f3 = price_p * p_s, f4 = price_q * q_s,
/// f = f1 - f2 - f3 - f4.
ObjectiveTerms objective_terms(double price_p, double price_q, double wind_injected, double p_loss,
                               double p_s, double q_s);

struct Evaluation {
  ObjectiveTerms terms;
  PowerFlowSolution flow;
  ConstraintReport report;
};

/// Power flow at injection beta .* wind_available, objective terms and limit report.
/// Propagates NonConvergence / SingularJacobian.
Evaluation evaluate_objective(const Network& net, const HorizonInput& input, const VectorX<double>& beta,
                              const PowerFlowOptions& pf = {}, double tol_cons = 1e-6);

enum class OpfStatus { optimal, infeasible, solver_failure };

std::string to_string(OpfStatus status);

struct OPFSolution {
  VectorX<double> beta;  // per station, in [0, 1]
  double p_s = 0.0;
  double q_s = 0.0;
  double p_loss = 0.0;
  ObjectiveTerms terms;
  OpfStatus status = OpfStatus::solver_failure;
  std::string diagnostic;
  PowerFlowSolution flow;
  int evaluations = 0;
};

struct OpfOptions {
  double tol_obj = 1e-7;   // $, smallest improvement a local step must bring
  double tol_cons = 1e-6;  // limit tolerance used for the final check
  double feasibility_tol = 1e-7;  // limit tolerance used during the search
  int max_evals = 20000;
  int coarse_points = 5;  // per station, for the seeding grid
  PowerFlowOptions pf{1e-10, 30, std::nullopt};
};

/**
 * Maximizes f over the curtailment factors subject to the power flow and every
 * operating limit.
 *
 * Multi-start projected local search from the best point of a coarse grid, from
 * beta = 1 and from beta = 0. Each iteration takes finite-difference gradients of
 * the objective and of all limit margins, projects the objective gradient onto
 * the tangent space of the limits that block it, and backtracks along that
 * direction; trial points that leave the feasible set through a curved limit
 * are pulled back along the gradients of the violated limits.
 */
OPFSolution solve_opf(const PowerFlowModel& model, const HorizonInput& input, const OpfOptions& opts = {});
OPFSolution solve_opf(const Network& net, const HorizonInput& input, const OpfOptions& opts = {});

/**
 * Brute-force reference: evaluates the full uniform grid with `grid_points` per
 * station, keeps the best violation-free point, then refines `refinements` times
 * on a grid ten times narrower centered on the incumbent.
 */
OPFSolution oracle_opf(const PowerFlowModel& model, const HorizonInput& input, int grid_points,
                       int refinements = 3, const OpfOptions& opts = {});
OPFSolution oracle_opf(const Network& net, const HorizonInput& input, int grid_points, int refinements = 3,
                       const OpfOptions& opts = {});

}  // namespace rtopf
