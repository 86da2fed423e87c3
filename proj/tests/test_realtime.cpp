#include <doctest.h>

#include <filesystem>

#include "rtopf/errors.hpp"
#include "rtopf/realtime.hpp"

using namespace rtopf;
using Eigen::VectorXd;

namespace {

const std::filesystem::path kData = RTOPF_DATA_DIR;

const Network& case41() {
  static const Network net = load_network(kData / "case41.json");
  return net;
}

const HorizonInput& first_input() {
  static const HorizonInput in = load_horizon_input(case41(), kData / "horizon_first.json");
  return in;
}

VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

LookupTable levels_only_table() {
  const LevelWidths w = LevelWidths::for_rating(10.0);
  LookupTable t;
  t.levels = make_levels(vec2(3.8, 7.05), {w, w}, vec2(10.0, 10.0));
  return t;
}

// First-horizon demand and forecast held for `horizons` slots; actual wind equals the forecast.
DayProfiles constant_profiles(Eigen::Index horizons) {
  DayProfiles pr;
  pr.demand.buses = case41().demand_buses();
  const auto nd = static_cast<Eigen::Index>(pr.demand.buses.size());
  pr.demand.p.resize(nd, horizons);
  pr.demand.q.resize(nd, horizons);
  for (Eigen::Index k = 0; k < nd; ++k) {
    const auto i = static_cast<Eigen::Index>(Network::index_of(pr.demand.buses[static_cast<std::size_t>(k)]));
    pr.demand.p.row(k).setConstant(first_input().demand_p(i));
    pr.demand.q.row(k).setConstant(first_input().demand_q(i));
  }
  pr.wind_forecast = first_input().wind_available.replicate(1, horizons);
  pr.wind_actual = first_input().wind_available.replicate(1, horizons * 6);
  return pr;
}

}  // namespace

TEST_CASE("timing configuration") {
  TimingConfig t;
  CHECK(t.updates_per_horizon() == 6);
  CHECK(t.proration() == doctest::Approx(1.0 / 6.0));
  CHECK_NOTHROW(validate(t));
  CHECK_THROWS_AS(validate(TimingConfig{120.0, 25.0, 112.0}), ValidationError);
  CHECK_THROWS_AS(validate(TimingConfig{120.0, 0.0, 112.0}), ValidationError);
  CHECK_THROWS_AS(validate(TimingConfig{120.0, 20.0, 120.0}), ValidationError);
  CHECK_THROWS_AS(validate(TimingConfig{10.0, 20.0, 5.0}), ValidationError);
}

TEST_CASE("selection rounds each station up to the next level") {
  const LookupTable t = levels_only_table();
  SUBCASE("between levels") {
    const Selection s = select_scenario(t, vec2(4.1, 7.3));
    CHECK(s.positions == std::vector<int>{2, 2});
    CHECK(s.index == 17);
    CHECK_FALSE(s.clamped);
  }
  SUBCASE("on the forecast") {
    const Selection s = select_scenario(t, vec2(3.8, 7.05));
    CHECK(s.index == 25);
    CHECK_FALSE(s.clamped);
  }
  SUBCASE("above every level") {
    const Selection s = select_scenario(t, vec2(5.6, 9.0));
    CHECK(s.index == 1);
    CHECK(s.clamped);
  }
  SUBCASE("one station above") {
    const Selection s = select_scenario(t, vec2(5.31, 5.0));
    CHECK(s.positions == std::vector<int>{0, 6});
    CHECK(s.clamped);
  }
  SUBCASE("below every level") {
    const Selection s = select_scenario(t, vec2(0.0, 1.0));
    CHECK(s.index == 49);
    CHECK_FALSE(s.clamped);
  }
  SUBCASE("exactly on a level") {
    CHECK(select_scenario(t, vec2(5.3, 8.55)).index == 1);
    CHECK(select_scenario(t, vec2(2.3, 5.55)).index == 49);
  }
  CHECK_THROWS_AS(select_scenario(t, VectorXd::Zero(3)), ValidationError);
}

TEST_CASE("the selected level is never below the actual wind unless clamped") {
  const LookupTable t = levels_only_table();
  for (double a = 0.0; a <= 6.0; a += 0.0625)
    for (double b = 4.0; b <= 10.0; b += 0.25) {
      const Selection s = select_scenario(t, vec2(a, b));
      const double la = t.levels.values(0, s.positions[0]);
      const double lb = t.levels.values(1, s.positions[1]);
      if (!s.clamped) {
        CHECK(la >= a);
        CHECK(lb >= b);
        // and the next lower level would not cover it
        if (s.positions[0] < 6) CHECK(t.levels.values(0, s.positions[0] + 1) < a);
        if (s.positions[1] < 6) CHECK(t.levels.values(1, s.positions[1] + 1) < b);
      } else {
        CHECK((a > 5.3 || b > 8.55));
      }
    }
}

TEST_CASE("realizing the planned wind reproduces the plan") {
  HorizonInput in = first_input();
  in.wind_available = vec2(4.3, 7.55);
  const OPFSolution plan = solve_opf(case41(), in);
  REQUIRE(plan.status == OpfStatus::optimal);
  const Realization r = apply_and_realize(case41(), first_input(), vec2(4.3, 7.55), plan.beta, 1.0 / 6.0);
  CHECK(std::abs(r.flow.p_s - plan.p_s) <= 1e-8);
  CHECK(std::abs(r.flow.q_s - plan.q_s) <= 1e-8);
  CHECK(r.terms.f == doctest::Approx(plan.terms.f / 6.0).epsilon(1e-9));
  CHECK(r.report.feasible());

  SUBCASE("less wind than planned means more import") {
    const VectorXd actual = vec2(4.1, 7.3);
    const Realization low = apply_and_realize(case41(), first_input(), actual, plan.beta, 1.0 / 6.0);
    for (Eigen::Index s = 0; s < 2; ++s) CHECK(plan.beta(s) * actual(s) <= plan.beta(s) * in.wind_available(s));
    CHECK(low.flow.p_s > r.flow.p_s);
    CHECK(low.report.feasible());
  }
  SUBCASE("no wind means no revenue") {
    const Realization none = apply_and_realize(case41(), first_input(), vec2(0.0, 0.0), plan.beta, 1.0 / 6.0);
    CHECK(none.terms.f1 == 0.0);
    CHECK(none.flow.p_s > 6.65);
  }
}

TEST_CASE("steady conditions follow the forecast row") {
  const DayRun run = run_day(case41(), constant_profiles(2), RunOptions{});
  REQUIRE(run.trace.size() == 12);
  for (std::size_t k = 0; k < run.trace.size(); ++k) {
    const TraceRecord& r = run.trace[k];
    CHECK(r.horizon_id == k / 6);
    CHECK(r.update_id == static_cast<int>(k % 6));
    CHECK(r.selected_index == 25);
    CHECK_FALSE(r.clamped);
    CHECK_FALSE(r.stale_table);
    REQUIRE(r.realized_ok);
    CHECK(r.realized_terms.f == doctest::Approx(r.planned_f).epsilon(1e-9));
    CHECK(r.planned_f == r.expected_f);
    CHECK(r.violations == 0);
    CHECK(r.applied_beta == r.forecast_beta);
  }
  CHECK(run.summary.horizons == 2);
  CHECK(run.summary.updates == 12);
  CHECK(run.summary.violation_intervals == 0);
  CHECK(run.summary.clamp_events == 0);
  CHECK(run.summary.table_failures == 0);
  CHECK(run.summary.realized_total.f == doctest::Approx(run.summary.expected_f_total).epsilon(1e-9));
  CHECK(run.build_durations.size() == 2);
}

TEST_CASE("the trace is reproducible with and without the pipeline") {
  DayProfiles pr = constant_profiles(2);
  pr.wind_actual.row(0) << 3.9, 3.4, 4.6, 2.2, 3.8, 5.0, 3.1, 4.4, 3.7, 2.9, 3.3, 4.0;
  pr.wind_actual.row(1) << 7.0, 7.7, 6.4, 8.1, 5.9, 7.2, 6.6, 7.9, 7.05, 6.2, 8.4, 7.1;
  const DayRun a = run_day(case41(), pr, RunOptions{});
  RunOptions serial;
  serial.pipeline = false;
  serial.workers = 3;
  const DayRun b = run_day(case41(), pr, serial);
  CHECK(trace_csv(case41(), a.trace) == trace_csv(case41(), b.trace));
  CHECK(trace_json(case41(), a.trace) == trace_json(case41(), b.trace));
  // conservatism: without a clamp, realized injection never exceeds the planned level's injection
  for (const TraceRecord& r : a.trace) {
    REQUIRE_FALSE(r.clamped);
    const auto pos = scenario_positions(r.selected_index, 2, 7);
    const WindLevels lv = make_levels(r.forecast_wind, {LevelWidths{}, LevelWidths{}}, vec2(10.0, 10.0));
    for (Eigen::Index s = 0; s < 2; ++s) {
      const double level = lv.values(s, pos[static_cast<std::size_t>(s)]);
      CHECK(r.applied_beta(s) * r.actual_wind(s) <= r.applied_beta(s) * level);
    }
    CHECK(r.violations == 0);
  }
}

TEST_CASE("wind above every level is logged as a clamp") {
  DayProfiles pr = constant_profiles(1);
  pr.wind_actual(0, 3) = 5.6;
  const DayRun run = run_day(case41(), pr, RunOptions{});
  CHECK(run.summary.clamp_events == 1);
  CHECK(run.trace[3].clamped);
  CHECK(run.trace[3].selected_index == 4);
  CHECK_FALSE(run.trace[2].clamped);
}

TEST_CASE("a table over budget is replaced by the previous one") {
  DayProfiles pr = constant_profiles(3);
  pr.wind_forecast.col(1) = vec2(3.0, 6.0);
  pr.wind_forecast.col(2) = vec2(3.0, 6.0);
  RunOptions opts;
  opts.timing.compute_budget = 1e-9;
  const DayRun run = run_day(case41(), pr, opts);
  CHECK(run.summary.deadline_misses == 3);
  CHECK(run.summary.stale_horizons == 2);
  CHECK_FALSE(run.trace[0].stale_table);
  CHECK(run.trace[6].stale_table);
  // the stale table still carries the first horizon's levels: actual (3.8, 7.05) selects M,M
  CHECK(run.trace[6].selected_index == 25);
  CHECK(run.trace[17].stale_table);
}

TEST_CASE("run options are checked against the profiles") {
  RunOptions opts;
  opts.timing = TimingConfig{120.0, 30.0, 112.0};
  CHECK_THROWS_AS(run_day(case41(), constant_profiles(1), opts), ValidationError);
}

TEST_CASE("plot panels cover every series") {
  const DayRun run = run_day(case41(), constant_profiles(1), RunOptions{});
  const auto panels = plot_panels(case41(), run, TimingConfig{});
  for (const char* name : {"plot_a_demand.csv", "plot_b_wind_bus2.csv", "plot_c_wind_bus16.csv", "plot_d_beta_bus2.csv",
                           "plot_e_beta_bus16.csv", "plot_f_slack_p.csv", "plot_g_slack_q.csv", "plot_h_objective.csv",
                           "plot_i_compute_time.csv"})
    CHECK(panels.count(name) == 1);
  const std::string summary = summary_json(run.summary);
  CHECK(summary.find("\"violation_intervals\"") != std::string::npos);
}
