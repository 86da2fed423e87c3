#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rtopf/errors.hpp"
#include "rtopf/powerflow.hpp"

using namespace rtopf;
using Eigen::VectorXd;

namespace {

Network two_bus(double s_l_max = 20.0, double shunt = 0.0) {
  Network net;
  net.name = "two-bus";
  net.s_s_max = 20.0;
  net.buses = {{1, BusKind::slack}, {2, BusKind::pq}};
  net.branches = {{1, 2, 0.01, 0.1, shunt, s_l_max}};
  return net;
}

InjectionSpec load_at(const Network& net, const std::vector<double>& p, const std::vector<double>& q) {
  InjectionSpec inj{VectorXd::Zero(static_cast<Eigen::Index>(net.bus_count())),
                    VectorXd::Zero(static_cast<Eigen::Index>(net.bus_count()))};
  for (std::size_t i = 1; i < p.size(); ++i) {
    inj.p(static_cast<Eigen::Index>(i)) = -p[i];
    inj.q(static_cast<Eigen::Index>(i)) = -q[i];
  }
  return inj;
}

std::vector<double> as_vector(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void check_against_oracle(const Network& net, const InjectionSpec& inj, double tol) {
  const PowerFlowSolution sol = solve_power_flow(net, inj);
  const auto gs = oracle::gauss_seidel(net, as_vector(inj.p), as_vector(inj.q));
  for (std::size_t i = 0; i < net.bus_count(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    CHECK(std::abs(sol.v(k) - std::abs(gs.v[i])) <= tol);
    CHECK(std::abs(sol.theta(k) - std::arg(gs.v[i])) <= tol);
  }
  CHECK(std::abs(sol.p_s - gs.p_s) <= 1e-6);
}

}  // namespace

TEST_CASE("zero injections give the flat profile") {
  const Network net = two_bus();
  const PowerFlowSolution sol = solve_power_flow(net, load_at(net, {0, 0}, {0, 0}));
  CHECK(sol.v.isApproxToConstant(1.0));
  CHECK(sol.theta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sol.p_s == 0.0);
  CHECK(sol.p_loss == 0.0);
  CHECK(sol.iterations == 0);
}

TEST_CASE("two-bus load matches Gauss-Seidel") {
  const Network net = two_bus();
  const InjectionSpec inj = load_at(net, {0, 1.0}, {0, 0.5});
  const PowerFlowSolution sol = solve_power_flow(net, inj);
  const auto gs = oracle::gauss_seidel(net, {0, -1.0}, {0, -0.5});
  CHECK(std::abs(sol.v(1) - std::abs(gs.v[1])) <= 1e-8);
  CHECK(std::abs(sol.theta(1) - std::arg(gs.v[1])) <= 1e-8);
  CHECK(std::abs(sol.p_s - gs.p_s) <= 1e-7);
  CHECK(std::abs(sol.q_s - gs.q_s) <= 1e-7);
  CHECK(sol.max_residual <= 1e-10);
  // importing the load plus a positive loss
  CHECK(sol.p_s > 1.0);
  CHECK(sol.p_loss == doctest::Approx(sol.p_s - 1.0).epsilon(1e-12));
}

TEST_CASE("beyond loadability the solve does not converge") {
  const Network net = two_bus();
  CHECK_THROWS_AS(solve_power_flow(net, load_at(net, {0, 1000.0}, {0, 0.0})), NonConvergence);
  try {
    solve_power_flow(net, load_at(net, {0, 1000.0}, {0, 0.0}), {1e-10, 10, std::nullopt});
  } catch (const NonConvergence& e) {
    CHECK(e.iterations() <= 10);
    CHECK(e.final_residual() > 1e-8);
  }
}

TEST_CASE("options are validated") {
  const Network net = two_bus();
  CHECK_THROWS_AS(solve_power_flow(net, load_at(net, {0, 1}, {0, 0}), {0.0, 50, std::nullopt}), ValidationError);
  CHECK_THROWS_AS(solve_power_flow(net, load_at(net, {0, 1}, {0, 0}), {1e-8, 0, std::nullopt}), ValidationError);
}

TEST_CASE("randomized small networks agree with Gauss-Seidel") {
  std::mt19937_64 rng(2024);
  int cases = 0;
  for (int trial = 0; cases < 50; ++trial) {
    const int n = 2 + trial % 5;
    Network net = oracle::random_network(rng, n, trial % 2 == 0, trial % 4 == 3);
    // well below loadability: peaks of at most 1 MW on a 10 MVA base
    std::vector<double> p(static_cast<std::size_t>(n), 0.0), q(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i < n; ++i) {
      p[static_cast<std::size_t>(i)] = net.buses[static_cast<std::size_t>(i)].demand_peak_p;
      q[static_cast<std::size_t>(i)] = net.buses[static_cast<std::size_t>(i)].demand_peak_q;
    }
    const InjectionSpec inj = load_at(net, p, q);
    check_against_oracle(net, inj, 1e-7);
    ++cases;
  }
  CHECK(cases == 50);
}

TEST_CASE("balance identity and non-negative losses") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 6;
    Network net = oracle::random_network(rng, n, trial % 2 == 0);
    InjectionSpec inj{VectorXd::Zero(n), VectorXd::Zero(n)};
    std::uniform_real_distribution<double> gen(0.0, 1.5);
    double demand = 0.0, wind = 0.0;
    for (int i = 1; i < n; ++i) {
      const double d = net.buses[static_cast<std::size_t>(i)].demand_peak_p;
      const double w = i % 2 == 0 ? gen(rng) : 0.0;
      inj.p(i) = w - d;
      inj.q(i) = -net.buses[static_cast<std::size_t>(i)].demand_peak_q;
      demand += d;
      wind += w;
    }
    const PowerFlowSolution sol = solve_power_flow(net, inj);
    CHECK(std::abs(sol.p_loss - (sol.p_s + wind - demand)) <= 1e-8);
    CHECK(sol.p_loss >= 0.0);
  }
}

TEST_CASE("warm start from the solution converges immediately") {
  std::mt19937_64 rng(5);
  const Network net = oracle::random_network(rng, 6, true);
  std::vector<double> p(6), q(6);
  for (int i = 1; i < 6; ++i) {
    p[static_cast<std::size_t>(i)] = net.buses[static_cast<std::size_t>(i)].demand_peak_p;
    q[static_cast<std::size_t>(i)] = net.buses[static_cast<std::size_t>(i)].demand_peak_q;
  }
  const InjectionSpec inj = load_at(net, p, q);
  const PowerFlowSolution cold = solve_power_flow(net, inj);
  const PowerFlowSolution warm = solve_power_flow(net, inj, {1e-10, 50, cold.state()});
  CHECK(warm.iterations <= 2);
  CHECK((warm.v - cold.v).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("no load and no shunts means no loss") {
  std::mt19937_64 rng(17);
  const Network net = oracle::random_network(rng, 5, false);
  const PowerFlowSolution sol = solve_power_flow(net, load_at(net, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}));
  CHECK(std::abs(sol.p_loss) <= 1e-12);
  CHECK(std::abs(sol.p_s) <= 1e-12);
}

TEST_CASE("bundled case solves within a handful of iterations") {
  const Network net = load_network(std::filesystem::path(RTOPF_DATA_DIR) / "case41.json");
  VectorXd dp(41), dq(41);
  for (const Bus& b : net.buses) {
    dp(b.id - 1) = b.demand_peak_p;
    dq(b.id - 1) = b.demand_peak_q;
  }
  const PowerFlowSolution sol = solve_power_flow(net, make_injection(net, dp, dq, VectorXd::Zero(2)));
  CHECK(sol.iterations < 10);
  CHECK(check_limits(net, sol).feasible());
  std::vector<double> p(41), q(41);
  for (int i = 0; i < 41; ++i) p[static_cast<std::size_t>(i)] = -dp(i), q[static_cast<std::size_t>(i)] = -dq(i);
  const auto gs = oracle::gauss_seidel(net, p, q);
  for (int i = 0; i < 41; ++i) CHECK(std::abs(sol.v(i) - std::abs(gs.v[static_cast<std::size_t>(i)])) <= 1e-7);
}

TEST_CASE("limit report on the flat solution") {
  Network net = two_bus();
  const PowerFlowSolution sol = solve_power_flow(net, load_at(net, {0, 0}, {0, 0}));
  const ConstraintReport rep = check_limits(net, sol);
  CHECK(rep.violation_count() == 0);
  CHECK(rep.checks.size() == 5 + 2 + 1);
}

TEST_CASE("reverse active flow at the slack is a violation") {
  const Network net = two_bus();
  PowerFlowSolution sol = solve_power_flow(net, load_at(net, {0, 0}, {0, 0}));
  sol.p_s = -0.3;
  const auto v = check_limits(net, sol).violations();
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ConstraintKind::slack_p_lower);
  CHECK(v[0].slack == doctest::Approx(-0.3));
}

TEST_CASE("branch overload is flagged alone") {
  // limit sits between the two branch-end flows of a 2 MW / 1 Mvar load, found with the oracle
  const Network probe = two_bus();
  const auto gs = oracle::gauss_seidel(probe, {0, -2.0}, {0, -1.0});
  const auto [from_end, to_end] = oracle::branch_ends(probe, gs.v, 0);
  const double worst = std::max(from_end, to_end);
  Network net = two_bus(0.5 * (std::min(from_end, to_end) + worst));
  net.buses[1].v_min = 0.5;
  const PowerFlowSolution sol = solve_power_flow(net, load_at(net, {0, 2.0}, {0, 1.0}));
  CHECK(sol.flows(0) == doctest::Approx(worst).epsilon(1e-9));
  const auto v = check_limits(net, sol).violations();
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ConstraintKind::branch_flow);
  CHECK(v[0].element == 0);
}
