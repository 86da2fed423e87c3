#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rtopf/opf.hpp"
#include "rtopf/profiles.hpp"

namespace fs = std::filesystem;
using namespace rtopf;

namespace {

const fs::path kData = RTOPF_DATA_DIR;

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "rtopf_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + RTOPF_CLI + "\" " + args + " > \"" +
                          (scratch() / "stdout.txt").string() + "\" 2> \"" + (scratch() / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const Network& case41() {
  static const Network net = load_network(kData / "case41.json");
  return net;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run("") == 1);
  CHECK(run("no-such-command") == 1);
  CHECK(run("solve-opf") == 1);
  CHECK(run("--help") == 0);
}

TEST_CASE("missing case file is an I/O error") {
  CHECK(run("solve-opf --case /nonexistent/case.json " + q(kData / "horizon_first.json") + " --out " +
            q(scratch() / "missing")) == 2);
  CHECK(slurp(scratch() / "stderr.txt").find("error") != std::string::npos);
}

TEST_CASE("malformed input is a validation error") {
  const fs::path bad = scratch() / "bad_input.json";
  std::ofstream(bad) << R"({"demand_p": {}, "demand_q": {}, "wind_available": [-1, 0]})";
  CHECK(run("solve-opf " + q(bad) + " --out " + q(scratch() / "bad")) == 3);
}

TEST_CASE("zero-wind solve reports no wind revenue") {
  HorizonInput in = load_horizon_input(case41(), kData / "horizon_first.json");
  in.wind_available.setZero();
  const fs::path input = scratch() / "zero_wind.json";
  std::ofstream(input) << serialize_horizon_input(case41(), in);
  REQUIRE(run("solve-opf " + q(input) + " --out " + q(scratch() / "zero")) == 0);
  const std::string csv = slurp(scratch() / "zero" / "opf_solution.csv");
  const std::string header = csv.substr(0, csv.find('\n'));
  const std::string row = csv.substr(csv.find('\n') + 1);
  // locate the f1 column by name
  std::size_t col = 0, pos = 0;
  for (std::size_t next; (next = header.find(',', pos)) != std::string::npos && header.substr(pos, next - pos) != "f1";
       pos = next + 1)
    ++col;
  std::stringstream cells(row);
  std::string cell;
  for (std::size_t k = 0; k <= col; ++k) std::getline(cells, cell, ',');
  CHECK(cell == "0");
  CHECK(slurp(scratch() / "stdout.txt") == csv);
}

TEST_CASE("first horizon imports nothing") {
  REQUIRE(run("solve-opf " + q(kData / "horizon_first.json") + " --out " + q(scratch() / "first")) == 0);
  CHECK(slurp(scratch() / "first" / "opf_solution.csv").find("optimal") != std::string::npos);
}

TEST_CASE("table build is independent of the worker count") {
  REQUIRE(run("build-table " + q(kData / "horizon_first.json") + " --workers 1 --out " + q(scratch() / "t1")) == 0);
  REQUIRE(run("build-table " + q(kData / "horizon_first.json") + " --workers 7 --out " + q(scratch() / "t7")) == 0);
  const std::string one = slurp(scratch() / "t1" / "lookup_table.csv");
  CHECK(one == slurp(scratch() / "t7" / "lookup_table.csv"));
  CHECK(std::count(one.begin(), one.end(), '\n') == 50);
  CHECK(slurp(scratch() / "t1" / "lookup_table_timing.json").find("\"deadline_met\": true") != std::string::npos);
}

TEST_CASE("profile generation is deterministic") {
  REQUIRE(run("gen-profiles --seed 5 --out " + q(scratch() / "g1")) == 0);
  REQUIRE(run("gen-profiles --seed 5 --out " + q(scratch() / "g2")) == 0);
  REQUIRE(run("gen-profiles --seed 6 --out " + q(scratch() / "g3")) == 0);
  const std::string a = slurp(scratch() / "g1" / "profiles.json");
  CHECK(a == slurp(scratch() / "g2" / "profiles.json"));
  CHECK(a != slurp(scratch() / "g3" / "profiles.json"));
  CHECK(load_profiles(case41(), scratch() / "g1" / "profiles.json").horizons() == 720);
}

TEST_CASE("short simulation writes a reproducible trace and the plot panels") {
  REQUIRE(run("gen-profiles --seed 1 --out " + q(scratch() / "day")) == 0);
  DayProfiles day = load_profiles(case41(), scratch() / "day" / "profiles.json");
  day.demand.p = day.demand.p.leftCols(3).eval();
  day.demand.q = day.demand.q.leftCols(3).eval();
  day.wind_forecast = day.wind_forecast.leftCols(3).eval();
  day.wind_actual = day.wind_actual.leftCols(18).eval();
  save_profiles(day, scratch() / "short.json");

  const std::string args = "simulate --profiles " + q(scratch() / "short.json") + " --workers 2 --emit-plots --emit-tables";
  REQUIRE(run(args + " --out " + q(scratch() / "s1")) == 0);
  REQUIRE(run(args + " --out " + q(scratch() / "s2")) == 0);
  const std::string trace = slurp(scratch() / "s1" / "trace.csv");
  CHECK(trace == slurp(scratch() / "s2" / "trace.csv"));
  CHECK(slurp(scratch() / "s1" / "trace.json") == slurp(scratch() / "s2" / "trace.json"));
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 19);
  CHECK(slurp(scratch() / "s1" / "summary.json").find("\"violation_intervals\": 0") != std::string::npos);
  for (const char* panel : {"plot_a_demand.csv", "plot_b_wind_bus2.csv", "plot_c_wind_bus16.csv", "plot_d_beta_bus2.csv",
                            "plot_e_beta_bus16.csv", "plot_f_slack_p.csv", "plot_g_slack_q.csv", "plot_h_objective.csv",
                            "plot_i_compute_time.csv"})
    CHECK(fs::exists(scratch() / "s1" / "plots" / panel));
  for (const char* table : {"table_0000.csv", "table_0001.csv", "table_0002.csv"}) {
    CHECK(fs::exists(scratch() / "s1" / "tables" / table));
    CHECK(slurp(scratch() / "s1" / "tables" / table) == slurp(scratch() / "s2" / "tables" / table));
  }
}

TEST_CASE("configuration file") {
  const fs::path cfg = scratch() / "config.json";
  std::ofstream(cfg) << R"({"case": ")" << (kData / "case41.json").string()
                     << R"(", "workers": 2, "levels": {"fraction_of_rated": 0.1}, "prices": {"p": 2.0, "q": 0.5}})";
  REQUIRE(run("build-table " + q(kData / "horizon_first.json") + " --config " + q(cfg) + " --out " +
              q(scratch() / "cfg")) == 0);
  const std::string csv = slurp(scratch() / "cfg" / "lookup_table.csv");
  // widest level is 10% of the 10 MW rating: 3.8 + 1.0
  CHECK(csv.find("1,\"Pw,H3-Pw,H3\",4.8,8.05,") != std::string::npos);

  const fs::path bad = scratch() / "bad_config.json";
  std::ofstream(bad) << R"({"workers": 2, "colour": "blue"})";
  CHECK(run("build-table " + q(kData / "horizon_first.json") + " --config " + q(bad)) == 3);
}
