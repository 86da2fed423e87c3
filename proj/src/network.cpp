#include "rtopf/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include "json_util.hpp"
#include "rtopf/errors.hpp"

namespace rtopf {

using detail::Json;

std::vector<BusId> Network::demand_buses() const {
  std::vector<BusId> ids;
  for (const Bus& b : buses)
    if (b.demand_peak_p > 0.0 || b.demand_peak_q > 0.0) ids.push_back(b.id);
  return ids;
}

std::vector<BusId> Network::station_buses() const {
  std::vector<BusId> ids;
  ids.reserve(stations.size());
  for (const WindStation& s : stations) ids.push_back(s.bus);
  return ids;
}

namespace {

void fail(const std::string& msg) { throw ValidationError(msg); }

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void validate(const Network& net) {
  if (!(net.base_mva > 0.0) || !finite(net.base_mva)) fail("meta.base_mva must be positive");
  if (!(net.base_kv > 0.0) || !finite(net.base_kv)) fail("meta.base_kv must be positive");
  if (!(net.s_s_max > 0.0) || !finite(net.s_s_max)) fail("meta.s_s_max must be positive");
  if (net.buses.empty()) fail("network has no buses");

  const auto n = static_cast<BusId>(net.buses.size());
  int slack_count = 0;
  for (BusId k = 1; k <= n; ++k) {
    const Bus& b = net.buses[Network::index_of(k)];
    const std::string where = "bus " + std::to_string(b.id);
    if (b.id != k) fail("bus ids must be 1..N in order; found " + std::to_string(b.id) + " at position " + std::to_string(k));
    if (b.kind == BusKind::slack) {
      ++slack_count;
      if (b.id != 1) fail(where + ": the slack bus must be bus 1");
    } else if (!(b.v_min > 0.0 && b.v_min < b.v_max) || !finite(b.v_max)) {
      fail(where + ": voltage bounds must satisfy 0 < v_min < v_max");
    }
    if (!(b.demand_peak_p >= 0.0) || !(b.demand_peak_q >= 0.0) || !finite(b.demand_peak_p) ||
        !finite(b.demand_peak_q))
      fail(where + ": demand peaks must be non-negative");
  }
  if (slack_count != 1) fail("exactly one slack bus required, found " + std::to_string(slack_count));

  auto exists = [n](BusId id) { return id >= 1 && id <= n; };
  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& br = net.branches[k];
    const std::string where = "branch " + std::to_string(k) + " (" + std::to_string(br.from_bus) +
                              "-" + std::to_string(br.to_bus) + ")";
    if (!exists(br.from_bus) || !exists(br.to_bus)) fail(where + ": endpoint does not exist");
    if (br.from_bus == br.to_bus) fail(where + ": from_bus equals to_bus");
    if (!(br.resistance >= 0.0) || !finite(br.resistance)) fail(where + ": resistance must be >= 0");
    if (br.reactance == 0.0 || !finite(br.reactance)) fail(where + ": reactance must be nonzero");
    if (!finite(br.shunt_susceptance_total)) fail(where + ": shunt susceptance must be finite");
    if (!(br.s_l_max > 0.0) || !finite(br.s_l_max)) fail(where + ": s_l_max must be positive");
  }

  std::set<BusId> station_buses;
  for (const WindStation& s : net.stations) {
    const std::string where = "station at bus " + std::to_string(s.bus);
    if (!exists(s.bus)) fail(where + ": bus does not exist");
    if (s.bus == 1) fail(where + ": a station cannot sit on the slack bus");
    if (!(s.rated_power > 0.0) || !finite(s.rated_power)) fail(where + ": rated_power must be positive");
    if (!station_buses.insert(s.bus).second) fail(where + ": duplicate station bus");
  }

  // Connectivity from the slack bus.
  std::vector<std::vector<BusId>> adj(net.buses.size());
  for (const Branch& br : net.branches) {
    adj[Network::index_of(br.from_bus)].push_back(br.to_bus);
    adj[Network::index_of(br.to_bus)].push_back(br.from_bus);
  }
  std::vector<bool> seen(net.buses.size(), false);
  std::queue<BusId> todo;
  todo.push(1);
  seen[0] = true;
  while (!todo.empty()) {
    const BusId at = todo.front();
    todo.pop();
    for (BusId next : adj[Network::index_of(at)]) {
      if (!seen[Network::index_of(next)]) {
        seen[Network::index_of(next)] = true;
        todo.push(next);
      }
    }
  }
  for (std::size_t k = 0; k < seen.size(); ++k)
    if (!seen[k]) fail("network is not connected: bus " + std::to_string(k + 1) + " unreachable from slack");
}

Network parse_network(const std::string& text) {
  const Json root = detail::parse_json(text, "case file");
  detail::require_object(root, "case");
  detail::reject_unknown(root, "case", {"meta", "buses", "branches", "stations"});

  Network net;
  const Json& meta = detail::field(root, "meta", "case");
  detail::require_object(meta, "meta");
  detail::reject_unknown(meta, "meta", {"name", "note", "base_mva", "base_kv", "s_s_max"});
  net.name = detail::string_or(meta, "name", "meta", "");
  net.note = detail::string_or(meta, "note", "meta", "");
  net.base_mva = detail::number_or(meta, "base_mva", "meta", 10.0);
  net.base_kv = detail::number(meta, "base_kv", "meta");
  net.s_s_max = detail::number(meta, "s_s_max", "meta");

  const Json& buses = detail::array(root, "buses", "case");
  for (std::size_t k = 0; k < buses.size(); ++k) {
    const std::string where = "buses[" + std::to_string(k) + "]";
    const Json& jb = buses[k];
    detail::require_object(jb, where);
    detail::reject_unknown(jb, where, {"id", "kind", "v_min", "v_max", "demand_peak_p", "demand_peak_q"});
    Bus b;
    b.id = detail::integer(jb, "id", where);
    const std::string kind = detail::string_or(jb, "kind", where, "pq");
    if (kind == "slack") {
      b.kind = BusKind::slack;
    } else if (kind == "pq") {
      b.kind = BusKind::pq;
    } else {
      throw ParseError(where + ".kind: expected \"slack\" or \"pq\", got \"" + kind + "\"");
    }
    b.v_min = detail::number_or(jb, "v_min", where, 0.95);
    b.v_max = detail::number_or(jb, "v_max", where, 1.05);
    b.demand_peak_p = detail::number_or(jb, "demand_peak_p", where, 0.0);
    b.demand_peak_q = detail::number_or(jb, "demand_peak_q", where, 0.0);
    net.buses.push_back(b);
  }
  std::stable_sort(net.buses.begin(), net.buses.end(),
                   [](const Bus& a, const Bus& b) { return a.id < b.id; });

  const Json& branches = detail::array(root, "branches", "case");
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const std::string where = "branches[" + std::to_string(k) + "]";
    const Json& jb = branches[k];
    detail::require_object(jb, where);
    detail::reject_unknown(jb, where, {"from_bus", "to_bus", "resistance", "reactance",
                                       "shunt_susceptance_total", "s_l_max"});
    Branch br;
    br.from_bus = detail::integer(jb, "from_bus", where);
    br.to_bus = detail::integer(jb, "to_bus", where);
    br.resistance = detail::number(jb, "resistance", where);
    br.reactance = detail::number(jb, "reactance", where);
    br.shunt_susceptance_total = detail::number_or(jb, "shunt_susceptance_total", where, 0.0);
    br.s_l_max = detail::number(jb, "s_l_max", where);
    net.branches.push_back(br);
  }

  if (root.contains("stations")) {
    const Json& stations = detail::array(root, "stations", "case");
    for (std::size_t k = 0; k < stations.size(); ++k) {
      const std::string where = "stations[" + std::to_string(k) + "]";
      const Json& js = stations[k];
      detail::require_object(js, where);
      detail::reject_unknown(js, where, {"bus", "rated_power", "power_factor"});
      WindStation s;
      s.bus = detail::integer(js, "bus", where);
      s.rated_power = detail::number(js, "rated_power", where);
      if (detail::number_or(js, "power_factor", where, 1.0) != 1.0)
        throw ValidationError(where + ": only unity power factor is supported");
      net.stations.push_back(s);
    }
  }

  validate(net);
  return net;
}

Network load_network(const std::filesystem::path& path) {
  return parse_network(detail::read_file(path));
}

std::string serialize_network(const Network& net) {
  Json root;
  Json meta = {{"base_mva", net.base_mva}, {"base_kv", net.base_kv}, {"s_s_max", net.s_s_max}};
  if (!net.name.empty()) meta["name"] = net.name;
  if (!net.note.empty()) meta["note"] = net.note;
  root["meta"] = meta;

  Json buses = Json::array();
  for (const Bus& b : net.buses) {
    buses.push_back({{"id", b.id},
                     {"kind", b.kind == BusKind::slack ? "slack" : "pq"},
                     {"v_min", b.v_min},
                     {"v_max", b.v_max},
                     {"demand_peak_p", b.demand_peak_p},
                     {"demand_peak_q", b.demand_peak_q}});
  }
  root["buses"] = buses;

  Json branches = Json::array();
  for (const Branch& br : net.branches) {
    branches.push_back({{"from_bus", br.from_bus},
                        {"to_bus", br.to_bus},
                        {"resistance", br.resistance},
                        {"reactance", br.reactance},
                        {"shunt_susceptance_total", br.shunt_susceptance_total},
                        {"s_l_max", br.s_l_max}});
  }
  root["branches"] = branches;

  Json stations = Json::array();
  for (const WindStation& s : net.stations)
    stations.push_back({{"bus", s.bus}, {"rated_power", s.rated_power}, {"power_factor", 1.0}});
  root["stations"] = stations;
  return root.dump(2) + "\n";
}

void save_network(const Network& net, const std::filesystem::path& path) {
  detail::write_file(path, serialize_network(net));
}

}  // namespace rtopf
