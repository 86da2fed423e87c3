// rtopf: command-line driver for the real-time OPF engine.
//
// Exit codes: 0 ok, 1 usage, 2 file I/O, 3 parse/validation, 4 OPF infeasible,
// 5 OPF solver failure or power-flow nonconvergence.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtopf/csv.hpp"
#include "rtopf/errors.hpp"
#include "rtopf/network.hpp"
#include "rtopf/opf.hpp"
#include "rtopf/profiles.hpp"
#include "rtopf/realtime.hpp"
#include "rtopf/scenarios.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rtopf;

namespace {

enum Exit { ok = 0, usage = 1, io = 2, invalid = 3, infeasible = 4, failure = 5 };

#ifndef RTOPF_DATA_DIR
#define RTOPF_DATA_DIR "data"
#endif

struct RunConfig {
  fs::path case_path = fs::path(RTOPF_DATA_DIR) / "case41.json";
  std::optional<fs::path> profiles;
  fs::path demand_shape = fs::path(RTOPF_DATA_DIR) / "demand_shape.json";
  fs::path wind_base = fs::path(RTOPF_DATA_DIR) / "wind_base.json";
  TimingConfig timing;
  double width_fraction = 0.15;
  std::vector<double> dp3;  // per station, overrides width_fraction
  ProfileGenConfig generator;
  double price_p = 1.67;
  double price_q = 0.4;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  fs::path out = ".";
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + p.string());
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [k, _] : j.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
      throw ParseError(where + ": unknown field '" + k + "'");
}

// Config file: every field optional; relative paths resolve against the file's directory.
void apply_config_file(RunConfig& cfg, const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  reject_unknown(j, "config", {"case", "profiles", "demand_shape", "wind_base", "timing", "levels", "generator",
                               "prices", "workers"});
  const fs::path dir = path.parent_path();
  auto resolve = [&](const json& v) { return dir / v.get<std::string>(); };
  try {
    if (j.contains("case")) cfg.case_path = resolve(j["case"]);
    if (j.contains("profiles")) cfg.profiles = resolve(j["profiles"]);
    if (j.contains("demand_shape")) cfg.demand_shape = resolve(j["demand_shape"]);
    if (j.contains("wind_base")) cfg.wind_base = resolve(j["wind_base"]);
    if (j.contains("timing")) {
      const json& t = j["timing"];
      reject_unknown(t, "config.timing", {"horizon", "update", "compute_budget"});
      cfg.timing.horizon = t.value("horizon", cfg.timing.horizon);
      cfg.timing.update = t.value("update", cfg.timing.update);
      cfg.timing.compute_budget = t.value("compute_budget", cfg.timing.compute_budget);
    }
    if (j.contains("levels")) {
      const json& l = j["levels"];
      reject_unknown(l, "config.levels", {"fraction_of_rated", "dp3"});
      cfg.width_fraction = l.value("fraction_of_rated", cfg.width_fraction);
      if (l.contains("dp3")) cfg.dp3 = l["dp3"].get<std::vector<double>>();
    }
    if (j.contains("generator")) {
      const json& g = j["generator"];
      reject_unknown(g, "config.generator", {"mu_d", "sigma_d", "mu_w", "sigma_w", "hourly_band", "seed"});
      ProfileGenConfig& p = cfg.generator;
      p.mu_d = g.value("mu_d", p.mu_d);
      p.sigma_d = g.value("sigma_d", p.sigma_d);
      p.mu_w = g.value("mu_w", p.mu_w);
      p.sigma_w = g.value("sigma_w", p.sigma_w);
      p.hourly_band = g.value("hourly_band", p.hourly_band);
      p.seed = g.value("seed", p.seed);
    }
    if (j.contains("prices")) {
      const json& p = j["prices"];
      reject_unknown(p, "config.prices", {"p", "q"});
      cfg.price_p = p.value("p", cfg.price_p);
      cfg.price_q = p.value("q", cfg.price_q);
    }
    if (j.contains("workers")) cfg.workers = j["workers"].get<std::size_t>();
  } catch (const json::type_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<LevelWidths> widths_for(const Network& net, const RunConfig& cfg) {
  std::vector<LevelWidths> w;
  if (!cfg.dp3.empty() && cfg.dp3.size() != net.station_count())
    throw ValidationError("config.levels.dp3: need one value per station");
  for (std::size_t s = 0; s < net.station_count(); ++s)
    w.push_back(cfg.dp3.empty() ? LevelWidths::for_rating(net.stations[s].rated_power, cfg.width_fraction)
                                : LevelWidths::from_widest(cfg.dp3[s]));
  for (const auto& x : w) validate(x);
  return w;
}

Eigen::VectorXd rated_of(const Network& net) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(net.station_count()));
  for (std::size_t s = 0; s < net.station_count(); ++s) r(static_cast<Eigen::Index>(s)) = net.stations[s].rated_power;
  return r;
}

std::string solution_row(const Network& net, const OPFSolution& sol) {
  std::vector<std::string> header;
  for (const auto& st : net.stations) header.push_back("beta_" + std::to_string(st.bus));
  for (const char* h : {"p_s", "q_s", "p_loss", "f", "f1", "f2", "f3", "f4", "status"}) header.emplace_back(h);
  CsvWriter csv(header);
  for (Eigen::Index s = 0; s < sol.beta.size(); ++s) csv.cell(sol.beta(s));
  csv.cell(sol.p_s).cell(sol.q_s).cell(sol.p_loss).cell(sol.terms.f).cell(sol.terms.f1).cell(sol.terms.f2);
  csv.cell(sol.terms.f3).cell(sol.terms.f4).cell(to_string(sol.status));
  csv.end_row();
  return csv.str();
}

int cmd_solve_opf(const RunConfig& cfg, const fs::path& input_path) {
  const Network net = load_network(cfg.case_path);
  const HorizonInput in = load_horizon_input(net, input_path);
  const OPFSolution sol = solve_opf(net, in);
  const std::string row = solution_row(net, sol);
  std::cout << row;
  if (!sol.diagnostic.empty()) std::cerr << "diagnostic: " << sol.diagnostic << "\n";
  write_text(cfg.out / "opf_solution.csv", row);
  switch (sol.status) {
    case OpfStatus::optimal: return ok;
    case OpfStatus::infeasible: return infeasible;
    case OpfStatus::solver_failure: return failure;
  }
  return failure;
}

int cmd_build_table(const RunConfig& cfg, const fs::path& input_path) {
  const Network net = load_network(cfg.case_path);
  const HorizonInput in = load_horizon_input(net, input_path);
  validate(cfg.timing);
  const WindLevels lv = make_levels(in.wind_available, widths_for(net, cfg), rated_of(net));
  TableBuildOptions opts;
  opts.workers = cfg.workers;
  opts.deadline = cfg.timing.compute_budget;
  const LookupTable table = build_lookup_table(net, in, enumerate_scenarios(lv), lv, opts);
  write_table_csv(net, table, cfg.out / "lookup_table.csv");
  std::size_t failed = 0;
  for (const auto& r : table.rows) failed += r.solution.status != OpfStatus::optimal;
  const json meta = {{"rows", table.rows.size()},
                     {"workers", cfg.workers},
                     {"build_duration", table.build_duration},
                     {"deadline", opts.deadline},
                     {"deadline_met", table.deadline_met},
                     {"non_optimal_rows", failed}};
  write_text(cfg.out / "lookup_table_timing.json", meta.dump(2) + "\n");
  std::cout << "wrote " << (cfg.out / "lookup_table.csv").string() << ": " << table.rows.size() << " rows, "
            << failed << " non-optimal, build " << table.build_duration << " s (deadline "
            << (table.deadline_met ? "met" : "missed") << ")\n";
  return ok;
}

DayProfiles profiles_for(const Network& net, const RunConfig& cfg) {
  if (cfg.profiles) return load_profiles(net, *cfg.profiles);
  return generate_day(net, load_hourly_shape(cfg.demand_shape), load_wind_base(net, cfg.wind_base), cfg.generator,
                      cfg.timing.horizon, cfg.timing.update);
}

int cmd_gen_profiles(const RunConfig& cfg) {
  const Network net = load_network(cfg.case_path);
  validate(cfg.timing);
  const DayProfiles pr = generate_day(net, load_hourly_shape(cfg.demand_shape), load_wind_base(net, cfg.wind_base),
                                      cfg.generator, cfg.timing.horizon, cfg.timing.update);
  save_profiles(pr, cfg.out / "profiles.json");
  write_text(cfg.out / "profiles_demand.csv", demand_csv(pr));
  write_text(cfg.out / "profiles_wind.csv", wind_csv(net, pr));
  std::cout << "wrote " << (cfg.out / "profiles.json").string() << ": " << pr.horizons() << " horizons, "
            << pr.wind_actual.cols() << " updates, seed " << cfg.generator.seed << "\n";
  return ok;
}

int cmd_simulate(const RunConfig& cfg, bool emit_plots, bool emit_tables) {
  const Network net = load_network(cfg.case_path);
  const DayProfiles pr = profiles_for(net, cfg);
  RunOptions opts;
  opts.timing = cfg.timing;
  opts.widths = widths_for(net, cfg);
  opts.workers = cfg.workers;
  opts.price_p = cfg.price_p;
  opts.price_q = cfg.price_q;
  if (emit_tables) {
    fs::create_directories(cfg.out / "tables");
    opts.on_table = [&](const LookupTable& t) {
      char name[32];
      std::snprintf(name, sizeof name, "table_%04zu.csv", t.horizon_id);
      write_table_csv(net, t, cfg.out / "tables" / name);
    };
  }
  const DayRun run = run_day(net, pr, opts);
  write_text(cfg.out / "trace.csv", trace_csv(net, run.trace));
  write_text(cfg.out / "trace.json", trace_json(net, run.trace));
  write_text(cfg.out / "summary.json", summary_json(run.summary));
  if (emit_plots)
    for (const auto& [file, text] : plot_panels(net, run, cfg.timing)) write_text(cfg.out / "plots" / file, text);

  const DaySummary& s = run.summary;
  std::cout << "horizons " << s.horizons << ", updates " << s.updates << "\n"
            << "realized f " << s.realized_total.f << " $ (f1 " << s.realized_total.f1 << ", f2 "
            << s.realized_total.f2 << ", f3 " << s.realized_total.f3 << ", f4 " << s.realized_total.f4 << ")\n"
            << "violation intervals " << s.violation_intervals << " (" << s.violation_intervals_unclamped
            << " unclamped), clamp events " << s.clamp_events << ", failed intervals " << s.failed_intervals
            << "\n"
            << "table build max " << s.max_build_duration << " s, mean " << s.mean_build_duration
            << " s, deadline misses " << s.deadline_misses << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time OPF engine for wind-penetrated distribution networks"};
  app.require_subcommand(1);

  std::string case_path, profiles_path, config_path, out_dir, input_path;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
  bool emit_plots = false, emit_tables = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--case", case_path, "Network case file (JSON)");
    sub->add_option("--config", config_path, "Run configuration file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
  };
  auto* solve = app.add_subcommand("solve-opf", "Solve one horizon's OPF");
  common(solve);
  solve->add_option("input", input_path, "Horizon input file (JSON)")->required();
  auto* table = app.add_subcommand("build-table", "Build the scenario lookup table for one horizon");
  common(table);
  table->add_option("input", input_path, "Horizon input file (JSON)")->required();
  table->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  auto* sim = app.add_subcommand("simulate", "Run the receding-horizon loop over a day");
  common(sim);
  sim->add_option("--profiles", profiles_path, "Profile bundle; generated from --seed when omitted");
  sim->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Profile generator seed");
  sim->add_flag("--emit-plots", emit_plots, "Write per-panel plot CSVs to <out>/plots");
  sim->add_flag("--emit-tables", emit_tables, "Write every horizon's lookup table to <out>/tables");
  auto* gen = app.add_subcommand("gen-profiles", "Generate a synthetic day of demand and wind");
  common(gen);
  gen->add_option("--seed", seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    if (!case_path.empty()) cfg.case_path = case_path;
    if (!profiles_path.empty()) cfg.profiles = fs::path(profiles_path);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (workers > 0) cfg.workers = workers;
    if (seed > 0 || (sim->count("--seed") + gen->count("--seed")) > 0) cfg.generator.seed = seed;
    if (cfg.workers < 1) throw ValidationError("workers must be at least 1");
    fs::create_directories(cfg.out);

    if (*solve) return cmd_solve_opf(cfg, input_path);
    if (*table) return cmd_build_table(cfg, input_path);
    if (*sim) return cmd_simulate(cfg, emit_plots, emit_tables);
    return cmd_gen_profiles(cfg);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return io;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return io;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid;
  } catch (const PowerFlowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
}
