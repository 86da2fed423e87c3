#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>

#include "oracles.hpp"
#include "rtopf/errors.hpp"
#include "rtopf/network.hpp"

using namespace rtopf;

namespace {

const std::filesystem::path kData = RTOPF_DATA_DIR;

std::string two_bus_json(const std::string& extra_bus = "", const std::string& branch_extra = "") {
  return R"({"meta": {"base_mva": 10, "base_kv": 27.6, "s_s_max": 20},
    "buses": [{"id": 1, "kind": "slack"}, {"id": 2, "kind": "pq", "demand_peak_p": 1.0, "demand_peak_q": 0.5})" +
         extra_bus + R"(],
    "branches": [{"from_bus": 1, "to_bus": 2, "resistance": 0.01, "reactance": 0.1, "s_l_max": 5)" + branch_extra +
         R"(}],
    "stations": []})";
}

}  // namespace

TEST_CASE("bundled case loads with the expected sets") {
  const Network net = load_network(kData / "case41.json");
  CHECK(net.bus_count() == 41);
  CHECK(net.station_buses() == std::vector<BusId>{2, 16});
  const std::vector<BusId> demand{4, 6, 8, 10, 13, 14, 22, 23, 25, 27, 30, 31, 34, 36, 37, 41};
  CHECK(net.demand_buses() == demand);
  CHECK(net.s_s_max == 20.0);
  CHECK(net.buses[0].kind == BusKind::slack);
  for (const auto& st : net.stations) CHECK(st.rated_power == 10.0);
}

TEST_CASE("minimal two-bus case") {
  const Network net = load_network(kData / "case2.json");
  CHECK(net.bus_count() == 2);
  CHECK(net.station_count() == 0);
  CHECK(net.buses[1].v_min == 0.95);
}

TEST_CASE("voltage bounds default when omitted") {
  const Network net = parse_network(two_bus_json());
  CHECK(net.buses[1].v_min == 0.95);
  CHECK(net.buses[1].v_max == 1.05);
  CHECK(net.base_mva == 10.0);
}

TEST_CASE("invariant violations are rejected") {
  SUBCASE("two slack buses") {
    CHECK_THROWS_AS(parse_network(two_bus_json(R"(, {"id": 3, "kind": "slack"})")), ValidationError);
  }
  SUBCASE("slack is not bus 1") {
    const std::string text = R"({"meta": {"base_kv": 27.6, "s_s_max": 20},
      "buses": [{"id": 1, "kind": "pq"}, {"id": 2, "kind": "slack"}],
      "branches": [{"from_bus": 1, "to_bus": 2, "resistance": 0.01, "reactance": 0.1, "s_l_max": 5}],
      "stations": []})";
    CHECK_THROWS_AS(parse_network(text), ValidationError);
  }
  SUBCASE("disconnected bus") {
    CHECK_THROWS_AS(parse_network(two_bus_json(R"(, {"id": 3, "kind": "pq"})")), ValidationError);
  }
  SUBCASE("zero reactance") {
    Network net = parse_network(two_bus_json());
    net.branches[0].reactance = 0.0;
    CHECK_THROWS_AS(validate(net), ValidationError);
  }
  SUBCASE("negative resistance") {
    Network net = parse_network(two_bus_json());
    net.branches[0].resistance = -0.01;
    CHECK_THROWS_AS(validate(net), ValidationError);
  }
  SUBCASE("self loop") {
    Network net = parse_network(two_bus_json());
    net.branches[0].from_bus = 2;
    CHECK_THROWS_AS(validate(net), ValidationError);
  }
  SUBCASE("inverted voltage bounds") {
    Network net = parse_network(two_bus_json());
    net.buses[1].v_min = 1.1;
    CHECK_THROWS_AS(validate(net), ValidationError);
  }
  SUBCASE("negative demand") {
    Network net = parse_network(two_bus_json());
    net.buses[1].demand_peak_q = -0.1;
    CHECK_THROWS_AS(validate(net), ValidationError);
  }
  SUBCASE("duplicate station bus") {
    Network net = parse_network(two_bus_json());
    net.stations = {{2, 1.0}, {2, 1.0}};
    CHECK_THROWS_AS(validate(net), ValidationError);
  }
  SUBCASE("non-positive rating") {
    Network net = parse_network(two_bus_json());
    net.stations = {{2, 0.0}};
    CHECK_THROWS_AS(validate(net), ValidationError);
  }
}

TEST_CASE("schema is strict") {
  CHECK_THROWS_AS(parse_network(two_bus_json("", R"(, "tap": 1.0)")), ParseError);
  CHECK_THROWS_AS(parse_network("{not json"), ParseError);
  CHECK_THROWS_AS(parse_network(R"({"meta": {}, "buses": []})"), ParseError);
  const std::string bad_pf = R"({"meta": {"base_kv": 27.6, "s_s_max": 20},
    "buses": [{"id": 1, "kind": "slack"}, {"id": 2}],
    "branches": [{"from_bus": 1, "to_bus": 2, "resistance": 0.01, "reactance": 0.1, "s_l_max": 5}],
    "stations": [{"bus": 2, "rated_power": 1, "power_factor": 0.9}]})";
  CHECK_THROWS_AS(parse_network(bad_pf), ValidationError);
  CHECK_THROWS_AS(load_network("/nonexistent/case.json"), IoError);
}

TEST_CASE("serialize and reload round-trips") {
  const Network net = load_network(kData / "case41.json");
  CHECK(parse_network(serialize_network(net)) == net);
  std::mt19937_64 rng(7);
  const Network r = oracle::random_network(rng, 6, true, true);
  CHECK(parse_network(serialize_network(r)) == r);
}

TEST_CASE("admittance of an empty network is zero") {
  Network net;
  net.s_s_max = 1.0;
  net.buses = {{1, BusKind::slack}, {2, BusKind::pq}};
  const auto y = build_admittance(net);
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("admittance of a single branch") {
  Network net = parse_network(two_bus_json());
  // 1/(0.01 + j0.1) = (0.01 - j0.1) / (0.01^2 + 0.1^2)
  const double den = 0.01 * 0.01 + 0.1 * 0.1;
  const std::complex<double> ys(0.01 / den, -0.1 / den);
  CHECK(ys.real() == doctest::Approx(0.990099).epsilon(1e-6));
  CHECK(ys.imag() == doctest::Approx(-9.900990).epsilon(1e-6));

  auto y = build_admittance(net);
  CHECK(std::abs(y(0, 1) + ys) < 1e-12);
  CHECK(std::abs(y(1, 0) + ys) < 1e-12);
  CHECK(std::abs(y(0, 0) - ys) < 1e-12);
  CHECK(std::abs(y(1, 1) - ys) < 1e-12);

  net.branches[0].shunt_susceptance_total = 0.02;
  const auto y2 = build_admittance(net);
  CHECK(std::abs(y2(0, 0) - (ys + std::complex<double>(0.0, 0.01))) < 1e-12);
  CHECK(std::abs(y2(1, 1) - (ys + std::complex<double>(0.0, 0.01))) < 1e-12);
  CHECK(std::abs(y2(0, 1) + ys) < 1e-12);
}

TEST_CASE("admittance is symmetric and matches the entrywise oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const bool shunts = trial % 2 == 1;
    const Network net = oracle::random_network(rng, 2 + trial % 5, shunts, trial % 3 == 0);
    const auto y = build_admittance(net);
    const auto ref = oracle::admittance(net);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      std::complex<double> row_sum(0.0, 0.0);
      for (Eigen::Index k = 0; k < y.cols(); ++k) {
        CHECK(std::abs(y(i, k) - y(k, i)) <= 1e-12);
        CHECK(std::abs(y(i, k) - ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) <= 1e-9);
        row_sum += y(i, k);
      }
      if (!shunts) CHECK(std::abs(row_sum) <= 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff()));
    }
  }
}
