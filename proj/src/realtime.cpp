#include "rtopf/realtime.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <optional>

#include "json_util.hpp"
#include "rtopf/csv.hpp"
#include "rtopf/errors.hpp"

namespace rtopf {

using Eigen::Index;
using Eigen::VectorXd;
using detail::Json;

int TimingConfig::updates_per_horizon() const { return static_cast<int>(std::lround(horizon / update)); }

void validate(const TimingConfig& t) {
  if (!(t.update > 0.0) || !std::isfinite(t.horizon)) throw ValidationError("timing: update must be positive");
  if (!(t.horizon >= t.update) || std::abs(t.updates_per_horizon() * t.update - t.horizon) > 1e-9)
    throw ValidationError("timing: horizon must be a whole multiple of update");
  if (!(t.compute_budget > 0.0) || !(t.compute_budget < t.horizon))
    throw ValidationError("timing: compute budget must lie in (0, horizon)");
}

Selection select_scenario(const LookupTable& table, const VectorXd& actual) {
  const WindLevels& lv = table.levels;
  if (actual.size() != lv.stations()) throw ValidationError("selection: one actual value per station required");
  Selection sel;
  sel.positions.resize(static_cast<std::size_t>(lv.stations()));
  for (Index s = 0; s < lv.stations(); ++s) {
    // levels are non-increasing along the row; walk up from the lowest
    int pos = static_cast<int>(lv.positions()) - 1;
    while (pos > 0 && lv.values(s, pos) < actual(s)) --pos;
    if (lv.values(s, pos) < actual(s)) sel.clamped = true;
    sel.positions[static_cast<std::size_t>(s)] = pos;
  }
  sel.index = scenario_index(sel.positions, static_cast<int>(lv.positions()));
  return sel;
}

Realization apply_and_realize(const PowerFlowModel& model, const HorizonInput& horizon, const VectorXd& actual,
                              const VectorXd& beta, double proration, double tol_cons) {
  const Network& net = model.network();
  if (beta.size() != actual.size()) throw ValidationError("realize: beta and actual wind sizes differ");
  const VectorXd injected = beta.cwiseProduct(actual);
  Realization r;
  r.flow = model.solve(make_injection(net, horizon.demand_p, horizon.demand_q, injected));
  r.terms = objective_terms(horizon.price_p * proration, horizon.price_q * proration, injected.sum(), r.flow.p_loss,
                            r.flow.p_s, r.flow.q_s);
  r.report = check_limits(net, r.flow, tol_cons);
  return r;
}

Realization apply_and_realize(const Network& net, const HorizonInput& horizon, const VectorXd& actual,
                              const VectorXd& beta, double proration, double tol_cons) {
  return apply_and_realize(PowerFlowModel(net), horizon, actual, beta, proration, tol_cons);
}

DayRun run_day(const Network& net, const DayProfiles& profiles, const RunOptions& opts) {
  validate(opts.timing);
  validate(net, profiles, false);
  if (profiles.updates_per_horizon() != opts.timing.updates_per_horizon())
    throw ValidationError("run: profile resolution does not match the timing configuration");

  const PowerFlowModel model(net);
  const auto n = static_cast<Index>(net.station_count());
  VectorXd rated(n);
  for (Index s = 0; s < n; ++s) rated(s) = net.stations[static_cast<std::size_t>(s)].rated_power;
  std::vector<LevelWidths> widths = opts.widths;
  if (widths.empty())
    for (Index s = 0; s < n; ++s) widths.push_back(LevelWidths::for_rating(rated(s)));

  TableBuildOptions build{opts.workers, opts.timing.compute_budget, opts.opf};
  auto build_table = [&](Index h) {
    const HorizonInput in = profiles.horizon_input(net, h, opts.price_p, opts.price_q);
    const WindLevels lv = make_levels(in.wind_available, widths, rated);
    return build_lookup_table(model, in, enumerate_scenarios(lv), lv, build, static_cast<std::size_t>(h));
  };

  const Index horizons = profiles.horizons();
  const int per = opts.timing.updates_per_horizon();
  const double proration = opts.timing.proration();
  DayRun run;
  run.trace.reserve(static_cast<std::size_t>(horizons * per));

  std::optional<LookupTable> active;
  std::size_t table_failures = 0;
  LookupTable next = build_table(0);
  for (Index h = 0; h < horizons; ++h) {
    LookupTable built = std::move(next);
    std::future<LookupTable> pending;
    if (h + 1 < horizons) {
      if (opts.pipeline) {
        pending = std::async(std::launch::async, build_table, h + 1);
      }
    }
    if (opts.on_table) opts.on_table(built);
    for (const auto& row : built.rows) table_failures += row.solution.status != OpfStatus::optimal;
    run.build_durations.push_back(built.build_duration);
    run.worker_seconds.push_back(built.worker_seconds);

    const bool stale = !built.deadline_met && active.has_value();
    const double build_duration = built.build_duration;
    const bool deadline_met = built.deadline_met;
    if (!stale) active = std::move(built);
    const LookupTable& table = *active;
    const LookupRow& center = table.row(scenario_index(
        std::vector<int>(static_cast<std::size_t>(n), static_cast<int>(table.levels.center())),
        static_cast<int>(table.levels.positions())));

    const HorizonInput in = profiles.horizon_input(net, h, opts.price_p, opts.price_q);
    for (int u = 0; u < per; ++u) {
      TraceRecord rec;
      rec.horizon_id = static_cast<std::size_t>(h);
      rec.update_id = u;
      rec.demand_p = in.demand_p.sum();
      rec.demand_q = in.demand_q.sum();
      rec.forecast_wind = in.wind_available;
      rec.actual_wind = profiles.actual(h, u);
      const Selection sel = select_scenario(table, rec.actual_wind);
      const LookupRow& row = table.row(sel.index);
      rec.selected_index = sel.index;
      rec.clamped = sel.clamped;
      rec.stale_table = stale;
      rec.applied_beta = row.solution.beta;
      rec.forecast_beta = center.solution.beta;
      rec.expected_p_s = center.solution.p_s;
      rec.expected_q_s = center.solution.q_s;
      rec.expected_f = center.solution.terms.f * proration;
      rec.planned_p_s = row.solution.p_s;
      rec.planned_f = row.solution.terms.f * proration;
      rec.table_build_duration = build_duration;
      rec.deadline_met = deadline_met;
      try {
        Realization r = apply_and_realize(model, in, rec.actual_wind, rec.applied_beta, proration, opts.opf.tol_cons);
        rec.realized_ok = true;
        rec.realized = std::move(r.flow);
        rec.realized_terms = r.terms;
        rec.violations = r.report.violation_count();
      } catch (const PowerFlowError& e) {
        rec.failure = e.what();
      }
      run.trace.push_back(std::move(rec));
    }

    if (h + 1 < horizons) next = opts.pipeline ? pending.get() : build_table(h + 1);
  }

  run.summary = summarize(run.trace, run.build_durations, opts.timing);
  run.summary.table_failures = table_failures;
  return run;
}

DaySummary summarize(const std::vector<TraceRecord>& trace, const std::vector<double>& build_durations,
                     const TimingConfig& timing) {
  DaySummary s;
  s.horizons = build_durations.size();
  s.updates = trace.size();
  const double hours = timing.update / 3600.0;
  std::size_t last_stale = static_cast<std::size_t>(-1);
  std::size_t last_miss = static_cast<std::size_t>(-1);
  for (const TraceRecord& r : trace) {
    s.expected_f_total += r.expected_f;
    s.demand_energy += r.demand_p * hours;
    s.wind_available_energy += r.actual_wind.sum() * hours;
    s.clamp_events += r.clamped;
    if (r.stale_table && r.horizon_id != last_stale) {
      ++s.stale_horizons;
      last_stale = r.horizon_id;
    }
    if (!r.deadline_met && r.horizon_id != last_miss) {
      ++s.deadline_misses;
      last_miss = r.horizon_id;
    }
    if (!r.realized_ok) {
      ++s.failed_intervals;
      continue;
    }
    s.realized_total.f += r.realized_terms.f;
    s.realized_total.f1 += r.realized_terms.f1;
    s.realized_total.f2 += r.realized_terms.f2;
    s.realized_total.f3 += r.realized_terms.f3;
    s.realized_total.f4 += r.realized_terms.f4;
    s.wind_injected_energy += r.applied_beta.cwiseProduct(r.actual_wind).sum() * hours;
    s.import_energy += r.realized.p_s * hours;
    if (r.violations > 0) {
      ++s.violation_intervals;
      if (!r.clamped) ++s.violation_intervals_unclamped;
    }
    if (!r.clamped && r.actual_wind.sum() > r.forecast_wind.sum() && r.realized.p_s > 1e-6) {
      ++s.import_drop_intervals;
      if (r.realized.p_s < r.expected_p_s) ++s.import_drop_confirmed;
    }
  }
  for (double d : build_durations) {
    s.max_build_duration = std::max(s.max_build_duration, d);
    s.mean_build_duration += d;
  }
  if (!build_durations.empty()) s.mean_build_duration /= static_cast<double>(build_durations.size());
  return s;
}

std::string trace_csv(const Network& net, const std::vector<TraceRecord>& trace) {
  std::vector<std::string> header{"horizon", "update", "demand_p", "demand_q"};
  for (const char* prefix : {"forecast_", "actual_", "beta_", "forecast_beta_"})
    for (const auto& st : net.stations) header.push_back(prefix + std::to_string(st.bus));
  for (const char* h : {"selected_index", "clamped", "stale_table", "expected_p_s", "expected_q_s", "expected_f",
                        "planned_p_s", "planned_f", "realized_ok", "p_s", "q_s", "p_loss", "f", "f1", "f2", "f3",
                        "f4", "violations"})
    header.emplace_back(h);

  CsvWriter csv(header);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const TraceRecord& r : trace) {
    csv.cell(r.horizon_id).cell(r.update_id).cell(r.demand_p).cell(r.demand_q);
    for (const VectorXd* v : {&r.forecast_wind, &r.actual_wind, &r.applied_beta, &r.forecast_beta})
      for (Index s = 0; s < v->size(); ++s) csv.cell((*v)(s));
    csv.cell(r.selected_index).cell(static_cast<int>(r.clamped)).cell(static_cast<int>(r.stale_table));
    csv.cell(r.expected_p_s).cell(r.expected_q_s).cell(r.expected_f).cell(r.planned_p_s).cell(r.planned_f);
    csv.cell(static_cast<int>(r.realized_ok));
    if (r.realized_ok) {
      csv.cell(r.realized.p_s).cell(r.realized.q_s).cell(r.realized.p_loss);
      csv.cell(r.realized_terms.f).cell(r.realized_terms.f1).cell(r.realized_terms.f2);
      csv.cell(r.realized_terms.f3).cell(r.realized_terms.f4);
    } else {
      for (int k = 0; k < 8; ++k) csv.cell(nan);
    }
    // wall-clock build times stay out of the trace so reruns compare byte for byte
    csv.cell(r.violations);
    csv.end_row();
  }
  return csv.str();
}

namespace {

Json vec_json(const VectorXd& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

std::string trace_json(const Network& net, const std::vector<TraceRecord>& trace) {
  Json rows = Json::array();
  for (const TraceRecord& r : trace) {
    Json j = {{"horizon", r.horizon_id},
              {"update", r.update_id},
              {"demand_p", r.demand_p},
              {"demand_q", r.demand_q},
              {"forecast_wind", vec_json(r.forecast_wind)},
              {"actual_wind", vec_json(r.actual_wind)},
              {"selected_index", r.selected_index},
              {"clamped", r.clamped},
              {"stale_table", r.stale_table},
              {"applied_beta", vec_json(r.applied_beta)},
              {"forecast_beta", vec_json(r.forecast_beta)},
              {"expected", {{"p_s", r.expected_p_s}, {"q_s", r.expected_q_s}, {"f", r.expected_f}}},
              {"planned", {{"p_s", r.planned_p_s}, {"f", r.planned_f}}},
              {"violations", r.violations}};
    if (r.realized_ok) {
      j["realized"] = {{"p_s", r.realized.p_s},          {"q_s", r.realized.q_s},
                       {"p_loss", r.realized.p_loss},    {"v_min", r.realized.v.minCoeff()},
                       {"v_max", r.realized.v.maxCoeff()}, {"f", r.realized_terms.f},
                       {"f1", r.realized_terms.f1},      {"f2", r.realized_terms.f2},
                       {"f3", r.realized_terms.f3},      {"f4", r.realized_terms.f4}};
    } else {
      j["realized"] = nullptr;
      j["failure"] = r.failure;
    }
    rows.push_back(std::move(j));
  }
  Json stations = Json::array();
  for (const auto& st : net.stations) stations.push_back(st.bus);
  return Json{{"stations", stations}, {"records", rows}}.dump(1) + "\n";
}

std::string summary_json(const DaySummary& s) {
  Json j = {{"horizons", s.horizons},
            {"updates", s.updates},
            {"realized", {{"f", s.realized_total.f},
                          {"f1", s.realized_total.f1},
                          {"f2", s.realized_total.f2},
                          {"f3", s.realized_total.f3},
                          {"f4", s.realized_total.f4}}},
            {"expected_f", s.expected_f_total},
            {"energy_mwh", {{"demand", s.demand_energy},
                            {"wind_available", s.wind_available_energy},
                            {"wind_injected", s.wind_injected_energy},
                            {"import", s.import_energy}}},
            {"violation_intervals", s.violation_intervals},
            {"violation_intervals_unclamped", s.violation_intervals_unclamped},
            {"clamp_events", s.clamp_events},
            {"failed_intervals", s.failed_intervals},
            {"stale_horizons", s.stale_horizons},
            {"deadline_misses", s.deadline_misses},
            {"table_failures", s.table_failures},
            {"build_duration", {{"max", s.max_build_duration}, {"mean", s.mean_build_duration}}},
            {"import_drop", {{"intervals", s.import_drop_intervals}, {"confirmed", s.import_drop_confirmed}}}};
  return j.dump(2) + "\n";
}

std::map<std::string, std::string> plot_panels(const Network& net, const DayRun& run, const TimingConfig& timing) {
  std::map<std::string, std::string> out;
  char letter = 'a';
  auto name = [&](const std::string& what) { return std::string("plot_") + letter++ + "_" + what + ".csv"; };
  auto time_of = [&](const TraceRecord& r) {
    return static_cast<double>(r.horizon_id) * timing.horizon + r.update_id * timing.update;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  {
    CsvWriter csv({"time_s", "demand_p", "demand_q"});
    for (const TraceRecord& r : run.trace)
      if (r.update_id == 0) csv.cell(time_of(r)).cell(r.demand_p).cell(r.demand_q), csv.end_row();
    out[name("demand")] = csv.str();
  }
  for (std::size_t s = 0; s < net.station_count(); ++s) {
    CsvWriter csv({"time_s", "forecast", "actual"});
    for (const TraceRecord& r : run.trace) {
      csv.cell(time_of(r)).cell(r.forecast_wind(static_cast<Index>(s))).cell(r.actual_wind(static_cast<Index>(s)));
      csv.end_row();
    }
    out[name("wind_bus" + std::to_string(net.stations[s].bus))] = csv.str();
  }
  for (std::size_t s = 0; s < net.station_count(); ++s) {
    CsvWriter csv({"time_s", "forecast", "applied"});
    for (const TraceRecord& r : run.trace) {
      csv.cell(time_of(r)).cell(r.forecast_beta(static_cast<Index>(s))).cell(r.applied_beta(static_cast<Index>(s)));
      csv.end_row();
    }
    out[name("beta_bus" + std::to_string(net.stations[s].bus))] = csv.str();
  }
  auto series = [&](const std::string& what, auto expected, auto realized) {
    CsvWriter csv({"time_s", "forecast", "actual"});
    for (const TraceRecord& r : run.trace) {
      csv.cell(time_of(r)).cell(expected(r)).cell(r.realized_ok ? realized(r) : nan);
      csv.end_row();
    }
    out[name(what)] = csv.str();
  };
  series("slack_p", [](const TraceRecord& r) { return r.expected_p_s; },
         [](const TraceRecord& r) { return r.realized.p_s; });
  series("slack_q", [](const TraceRecord& r) { return r.expected_q_s; },
         [](const TraceRecord& r) { return r.realized.q_s; });
  series("objective", [](const TraceRecord& r) { return r.expected_f; },
         [](const TraceRecord& r) { return r.realized_terms.f; });
  {
    std::size_t workers = 0;
    for (const auto& w : run.worker_seconds) workers = std::max(workers, w.size());
    std::vector<std::string> header{"time_s", "build_duration"};
    for (std::size_t w = 0; w < workers; ++w) header.push_back("worker_" + std::to_string(w + 1));
    CsvWriter csv(header);
    for (std::size_t h = 0; h < run.build_durations.size(); ++h) {
      csv.cell(static_cast<double>(h) * timing.horizon).cell(run.build_durations[h]);
      for (std::size_t w = 0; w < workers; ++w)
        csv.cell(w < run.worker_seconds[h].size() ? run.worker_seconds[h][w] : nan);
      csv.end_row();
    }
    out[name("compute_time")] = csv.str();
  }
  return out;
}

}  // namespace rtopf
