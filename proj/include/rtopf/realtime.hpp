#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rtopf/network.hpp"
#include "rtopf/opf.hpp"
#include "rtopf/powerflow.hpp"
#include "rtopf/profiles.hpp"
#include "rtopf/scenarios.hpp"

namespace rtopf {

struct TimingConfig {
  double horizon = 120.0;         // s
  double update = 20.0;           // s
  double compute_budget = 112.0;  // s reserved for the table build

  int updates_per_horizon() const;
  double proration() const { return update / horizon; }
};

void validate(const TimingConfig& timing);

struct Selection {
  std::size_t index = 0;
  std::vector<int> positions;  // per station, 0 = highest level
  bool clamped = false;        // some station's actual wind was above its highest level
};

/**
 * Per station, the lowest level that is still >= the actual wind (the highest
 * level when the actual wind is above all of them). The table's planned
 * injection therefore never falls below what the realized wind can deliver.
 */
Selection select_scenario(const LookupTable& table, const Eigen::VectorXd& actual);

struct Realization {
  PowerFlowSolution flow;
  ObjectiveTerms terms;  // prices prorated to the update interval
  ConstraintReport report;
};

/// Power flow with injection beta .* actual and the horizon's demand.
/// Propagates NonConvergence / SingularJacobian.
Realization apply_and_realize(const PowerFlowModel& model, const HorizonInput& horizon, const Eigen::VectorXd& actual,
                              const Eigen::VectorXd& beta, double proration, double tol_cons = 1e-6);
Realization apply_and_realize(const Network& net, const HorizonInput& horizon, const Eigen::VectorXd& actual,
                              const Eigen::VectorXd& beta, double proration, double tol_cons = 1e-6);

struct TraceRecord {
  std::size_t horizon_id = 0;
  int update_id = 0;
  double demand_p = 0.0;  // MW, network total
  double demand_q = 0.0;
  Eigen::VectorXd forecast_wind;
  Eigen::VectorXd actual_wind;
  std::size_t selected_index = 0;
  bool clamped = false;
  bool stale_table = false;  // previous horizon's table was used
  Eigen::VectorXd applied_beta;
  Eigen::VectorXd forecast_beta;  // beta of the forecast (M,...,M) row
  // forecast row values; f prorated to the update interval
  double expected_p_s = 0.0;
  double expected_q_s = 0.0;
  double expected_f = 0.0;
  // selected row values
  double planned_p_s = 0.0;
  double planned_f = 0.0;
  bool realized_ok = false;
  std::string failure;
  PowerFlowSolution realized;
  ObjectiveTerms realized_terms;
  int violations = 0;
  double table_build_duration = 0.0;
  bool deadline_met = true;
};

struct DaySummary {
  std::size_t horizons = 0;
  std::size_t updates = 0;
  ObjectiveTerms realized_total;
  double expected_f_total = 0.0;
  double demand_energy = 0.0;         // MWh
  double wind_available_energy = 0.0; // MWh of actual wind
  double wind_injected_energy = 0.0;  // MWh
  double import_energy = 0.0;         // MWh at the slack bus
  std::size_t violation_intervals = 0;
  std::size_t violation_intervals_unclamped = 0;
  std::size_t clamp_events = 0;
  std::size_t failed_intervals = 0;
  std::size_t stale_horizons = 0;
  std::size_t deadline_misses = 0;
  std::size_t table_failures = 0;  // rows with status other than optimal
  double max_build_duration = 0.0;
  double mean_build_duration = 0.0;
  // intervals with more total wind than forecast while still importing
  std::size_t import_drop_intervals = 0;
  std::size_t import_drop_confirmed = 0;  // ... where realized p_s < expected p_s
};

struct DayRun {
  std::vector<TraceRecord> trace;
  std::vector<double> build_durations;              // per horizon
  std::vector<std::vector<double>> worker_seconds;  // per horizon, per worker
  DaySummary summary;
};

struct RunOptions {
  TimingConfig timing;
  std::vector<LevelWidths> widths;  // per station; empty = 15% of rated
  std::size_t workers = 1;
  OpfOptions opf;
  double price_p = 1.67;
  double price_q = 0.4;
  bool pipeline = true;  // build horizon h+1 while horizon h is being applied
  std::function<void(const LookupTable&)> on_table;
};

/**
 * Receding-horizon loop over the whole profile: per horizon a table from the
 * forecast, then one select/apply/realize step per update against the actual
 * wind. A table that misses the compute budget is replaced by the previous one.
 * Interval failures are recorded and the run goes on.
 */
DayRun run_day(const Network& net, const DayProfiles& profiles, const RunOptions& opts);

/// Totals over a trace. Table row failures are counted by run_day, not here.
DaySummary summarize(const std::vector<TraceRecord>& trace, const std::vector<double>& build_durations,
                     const TimingConfig& timing);

std::string trace_csv(const Network& net, const std::vector<TraceRecord>& trace);
std::string trace_json(const Network& net, const std::vector<TraceRecord>& trace);
std::string summary_json(const DaySummary& summary);

/// Plot-data CSVs keyed by file name: demand, wind and beta per station,
/// slack P and Q, objective, and per-worker compute time.
std::map<std::string, std::string> plot_panels(const Network& net, const DayRun& run, const TimingConfig& timing);

}  // namespace rtopf
