#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rtopf/network.hpp"
#include "rtopf/opf.hpp"

namespace rtopf {

/// Offsets of the wind levels above and below the forecast for one station.
/// The widest offset is three times the narrowest and 1.5 times the middle one.
struct LevelWidths {
  double dp1 = 0.5;
  double dp2 = 1.0;
  double dp3 = 1.5;

  static LevelWidths from_widest(double dp3);
  /// Default rule: widest offset is 15% of the rated power.
  static LevelWidths for_rating(double rated_power, double fraction = 0.15);
  bool operator==(const LevelWidths&) const = default;
};

void validate(const LevelWidths& widths);

/// Level names in table order for three levels per side: H3 H2 H1 M L1 L2 L3.
std::vector<std::string> level_names(int levels_per_side = 3);

/**
 * Wind levels of all stations for one horizon. `values(s, p)` is the level at
 * position p (0-based, highest first) of station s, already clamped to
 * [0, rated]; `raw` keeps the unclamped values.
 */
struct WindLevels {
  int levels_per_side = 3;
  Eigen::MatrixXd values;
  Eigen::MatrixXd raw;
  Eigen::VectorXd forecast;

  Eigen::Index stations() const { return values.rows(); }
  Eigen::Index positions() const { return values.cols(); }
  Eigen::Index center() const { return levels_per_side; }
};

/**
 * Levels forecast +/- dp_sigma for sigma = 3, 2, 1 per station, clamped to
 * [0, rated]. `widths` holds one entry per station.
 */
WindLevels make_levels(const Eigen::VectorXd& forecast, const std::vector<LevelWidths>& widths,
                       const Eigen::VectorXd& rated);

/// Same with a general number of levels per side: offsets k * unit[s], k = 1..L.
WindLevels make_levels(const Eigen::VectorXd& forecast, const Eigen::VectorXd& unit, const Eigen::VectorXd& rated,
                       int levels_per_side);

struct Scenario {
  std::size_t index = 0;           // 1-based table row
  std::vector<int> level_choice;   // 0-based position per station
  Eigen::VectorXd wind;            // MW per station
  std::string label;               // e.g. "Pw,H3-Pw,M"
};

/// 1-based row index of a per-station position choice; station 0 is the most significant digit.
std::size_t scenario_index(const std::vector<int>& positions, int positions_per_station);
std::vector<int> scenario_positions(std::size_t index, std::size_t stations, int positions_per_station);

/// All (2L+1)^n scenarios in table order.
std::vector<Scenario> enumerate_scenarios(const WindLevels& levels);

struct LookupRow {
  Scenario scenario;
  OPFSolution solution;
};

struct LookupTable {
  std::size_t horizon_id = 0;
  WindLevels levels;
  std::vector<LookupRow> rows;  // sorted by scenario index
  double build_duration = 0.0;  // s, wall clock
  std::vector<double> worker_seconds;  // busy time per worker thread
  bool deadline_met = true;

  const LookupRow& row(std::size_t index) const { return rows.at(index - 1); }
};

struct TableBuildOptions {
  std::size_t workers = 1;
  double deadline = 112.0;  // s
  OpfOptions opf;
};

/**
 * Solves every scenario OPF (the horizon's demand and prices with the scenario
 * wind substituted) on a pool of `workers` threads. Rows are gathered by
 * scenario index, so the table does not depend on the worker count.
 */
LookupTable build_lookup_table(const PowerFlowModel& model, const HorizonInput& base,
                               const std::vector<Scenario>& scenarios, const WindLevels& levels,
                               const TableBuildOptions& opts, std::size_t horizon_id = 0);
LookupTable build_lookup_table(const Network& net, const HorizonInput& base, const std::vector<Scenario>& scenarios,
                               const WindLevels& levels, const TableBuildOptions& opts, std::size_t horizon_id = 0);

/// CSV: index, scenario, wind per station, beta per station, p_s, q_s, f, f1..f4, status.
/// Timing is deliberately not part of the CSV so tables compare byte for byte.
std::string table_csv(const Network& net, const LookupTable& table);
void write_table_csv(const Network& net, const LookupTable& table, const std::filesystem::path& path);

}  // namespace rtopf
