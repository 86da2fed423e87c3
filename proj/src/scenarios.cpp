#include "rtopf/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "json_util.hpp"
#include "rtopf/csv.hpp"
#include "rtopf/errors.hpp"

namespace rtopf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

LevelWidths LevelWidths::from_widest(double dp3) { return {dp3 / 3.0, dp3 / 1.5, dp3}; }

LevelWidths LevelWidths::for_rating(double rated_power, double fraction) {
  return from_widest(fraction * rated_power);
}

void validate(const LevelWidths& w) {
  if (!(w.dp1 > 0.0) || !std::isfinite(w.dp3)) throw ValidationError("level widths: dp1 must be positive");
  // widths derived by division can miss the ratios by an ulp
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * w.dp3;
  if (std::abs(w.dp3 - 1.5 * w.dp2) > tol || std::abs(w.dp3 - 3.0 * w.dp1) > tol)
    throw ValidationError("level widths: need dp3 = 1.5 dp2 = 3 dp1");
}

std::vector<std::string> level_names(int levels_per_side) {
  std::vector<std::string> names;
  for (int k = levels_per_side; k >= 1; --k) names.push_back("H" + std::to_string(k));
  names.push_back("M");
  for (int k = 1; k <= levels_per_side; ++k) names.push_back("L" + std::to_string(k));
  return names;
}

namespace {

WindLevels levels_from_offsets(const VectorXd& forecast, const MatrixXd& offsets, const VectorXd& rated) {
  // offsets(s, k-1) is the k-th offset of station s, increasing in k
  const Index n = forecast.size();
  const Index per_side = offsets.cols();
  if (rated.size() != n || offsets.rows() != n) throw ValidationError("levels: one entry per station required");
  WindLevels lv;
  lv.levels_per_side = static_cast<int>(per_side);
  lv.forecast = forecast;
  lv.raw.resize(n, 2 * per_side + 1);
  for (Index s = 0; s < n; ++s) {
    if (!(forecast(s) >= 0.0 && forecast(s) <= rated(s)))
      throw ValidationError("levels: forecast of station " + std::to_string(s + 1) + " outside [0, rated]");
    for (Index k = 1; k <= per_side; ++k) {
      lv.raw(s, per_side - k) = forecast(s) + offsets(s, k - 1);
      lv.raw(s, per_side + k) = forecast(s) - offsets(s, k - 1);
    }
    lv.raw(s, per_side) = forecast(s);
  }
  lv.values = lv.raw;
  for (Index s = 0; s < n; ++s) lv.values.row(s) = lv.raw.row(s).cwiseMax(0.0).cwiseMin(rated(s));
  return lv;
}

}  // namespace

WindLevels make_levels(const VectorXd& forecast, const std::vector<LevelWidths>& widths, const VectorXd& rated) {
  if (widths.size() != static_cast<std::size_t>(forecast.size()))
    throw ValidationError("levels: one width set per station required");
  MatrixXd offsets(forecast.size(), 3);
  for (std::size_t s = 0; s < widths.size(); ++s) {
    validate(widths[s]);
    offsets.row(static_cast<Index>(s)) << widths[s].dp1, widths[s].dp2, widths[s].dp3;
  }
  return levels_from_offsets(forecast, offsets, rated);
}

WindLevels make_levels(const VectorXd& forecast, const VectorXd& unit, const VectorXd& rated, int levels_per_side) {
  if (levels_per_side < 1) throw ValidationError("levels: need at least one level per side");
  if (unit.size() != forecast.size()) throw ValidationError("levels: one width per station required");
  if (!(unit.array() > 0.0).all()) throw ValidationError("levels: widths must be positive");
  MatrixXd offsets(forecast.size(), levels_per_side);
  for (int k = 1; k <= levels_per_side; ++k) offsets.col(k - 1) = unit * static_cast<double>(k);
  return levels_from_offsets(forecast, offsets, rated);
}

std::size_t scenario_index(const std::vector<int>& positions, int positions_per_station) {
  std::size_t index = 0;
  for (int p : positions) {
    if (p < 0 || p >= positions_per_station) throw ValidationError("scenario: level position out of range");
    index = index * static_cast<std::size_t>(positions_per_station) + static_cast<std::size_t>(p);
  }
  return index + 1;
}

std::vector<int> scenario_positions(std::size_t index, std::size_t stations, int positions_per_station) {
  std::vector<int> pos(stations);
  std::size_t rest = index - 1;
  for (std::size_t s = stations; s-- > 0;) {
    pos[s] = static_cast<int>(rest % static_cast<std::size_t>(positions_per_station));
    rest /= static_cast<std::size_t>(positions_per_station);
  }
  if (index == 0 || rest != 0) throw ValidationError("scenario: index out of range");
  return pos;
}

std::vector<Scenario> enumerate_scenarios(const WindLevels& levels) {
  const auto n = static_cast<std::size_t>(levels.stations());
  const auto per = static_cast<int>(levels.positions());
  const auto names = level_names(levels.levels_per_side);
  std::size_t count = 1;
  for (std::size_t s = 0; s < n; ++s) count *= static_cast<std::size_t>(per);

  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t index = 1; index <= count; ++index) {
    Scenario sc;
    sc.index = index;
    sc.level_choice = scenario_positions(index, n, per);
    sc.wind.resize(static_cast<Index>(n));
    for (std::size_t s = 0; s < n; ++s) {
      sc.wind(static_cast<Index>(s)) = levels.values(static_cast<Index>(s), sc.level_choice[s]);
      if (s > 0) sc.label += '-';
      sc.label += "Pw," + names[static_cast<std::size_t>(sc.level_choice[s])];
    }
    out.push_back(std::move(sc));
  }
  return out;
}

LookupTable build_lookup_table(const PowerFlowModel& model, const HorizonInput& base,
                               const std::vector<Scenario>& scenarios, const WindLevels& levels,
                               const TableBuildOptions& opts, std::size_t horizon_id) {
  if (opts.workers < 1) throw ValidationError("table build: workers must be at least 1");
  const auto start = std::chrono::steady_clock::now();

  LookupTable table;
  table.horizon_id = horizon_id;
  table.levels = levels;
  table.rows.resize(scenarios.size());

  const std::size_t threads = std::min(opts.workers, std::max<std::size_t>(scenarios.size(), 1));
  table.worker_seconds.assign(threads, 0.0);
  std::atomic<std::size_t> next{0};
  auto work = [&](std::size_t worker) {
    const auto begin = std::chrono::steady_clock::now();
    for (std::size_t k = next++; k < scenarios.size(); k = next++) {
      HorizonInput in = base;
      in.wind_available = scenarios[k].wind;
      LookupRow& row = table.rows[k];
      row.scenario = scenarios[k];
      try {
        row.solution = solve_opf(model, in, opts.opf);
      } catch (const std::exception& e) {
        row.solution = OPFSolution{};
        row.solution.beta = VectorXd::Ones(in.wind_available.size());
        row.solution.status = OpfStatus::solver_failure;
        row.solution.diagnostic = e.what();
      }
    }
    table.worker_seconds[worker] = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }

  std::sort(table.rows.begin(), table.rows.end(),
            [](const LookupRow& a, const LookupRow& b) { return a.scenario.index < b.scenario.index; });
  table.build_duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  table.deadline_met = table.build_duration <= opts.deadline;
  return table;
}

LookupTable build_lookup_table(const Network& net, const HorizonInput& base, const std::vector<Scenario>& scenarios,
                               const WindLevels& levels, const TableBuildOptions& opts, std::size_t horizon_id) {
  return build_lookup_table(PowerFlowModel(net), base, scenarios, levels, opts, horizon_id);
}

std::string table_csv(const Network& net, const LookupTable& table) {
  std::vector<std::string> header{"index", "scenario"};
  for (const auto& st : net.stations) header.push_back("pw_" + std::to_string(st.bus));
  for (const auto& st : net.stations) header.push_back("beta_" + std::to_string(st.bus));
  for (const char* h : {"p_s", "q_s", "f", "f1", "f2", "f3", "f4", "status"}) header.emplace_back(h);

  CsvWriter csv(header);
  for (const LookupRow& row : table.rows) {
    const OPFSolution& sol = row.solution;
    csv.cell(row.scenario.index).cell(row.scenario.label);
    for (Index s = 0; s < row.scenario.wind.size(); ++s) csv.cell(row.scenario.wind(s));
    for (Index s = 0; s < sol.beta.size(); ++s) csv.cell(sol.beta(s));
    csv.cell(sol.p_s).cell(sol.q_s).cell(sol.terms.f).cell(sol.terms.f1).cell(sol.terms.f2).cell(sol.terms.f3);
    csv.cell(sol.terms.f4).cell(to_string(sol.status));
    csv.end_row();
  }
  return csv.str();
}

void write_table_csv(const Network& net, const LookupTable& table, const std::filesystem::path& path) {
  detail::write_file(path, table_csv(net, table));
}

}  // namespace rtopf
