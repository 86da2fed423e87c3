#include "rtopf/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json_util.hpp"
#include "rtopf/csv.hpp"
#include "rtopf/errors.hpp"

namespace rtopf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using detail::Json;

void validate(const ProfileGenConfig& cfg) {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(cfg.mu_d) || !finite(cfg.mu_w)) throw ValidationError("profile config: means must be finite");
  if (!(cfg.sigma_d >= 0.0) || !finite(cfg.sigma_d)) throw ValidationError("profile config: sigma_d must be >= 0");
  if (!(cfg.sigma_w >= 0.0) || !finite(cfg.sigma_w)) throw ValidationError("profile config: sigma_w must be >= 0");
  if (!(cfg.hourly_band >= 0.0) || !(cfg.hourly_band < 1.0))
    throw ValidationError("profile config: hourly_band must lie in [0, 1)");
}

namespace {

// Every draw gets its own engine seeded from (seed, kind, element, hour, slot),
// so adding a bus or station never shifts the numbers of another one.
enum Stream : std::uint32_t { demand_noise = 1, wind_hour = 2, wind_slot = 3, wind_actual = 4 };

std::mt19937_64 stream(std::uint64_t seed, Stream kind, std::uint32_t element, std::uint32_t hour,
                       std::uint32_t slot) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind), element, hour, slot};
  return std::mt19937_64(seq);
}

double normal(std::mt19937_64& rng, double mu, double sigma) {
  if (sigma == 0.0) return mu;
  return std::normal_distribution<double>(mu, sigma)(rng);
}

double uniform(std::mt19937_64& rng, double band) {
  if (band == 0.0) return 0.0;
  return std::uniform_real_distribution<double>(-band, band)(rng);
}

void check_hourly(Index cols, const char* what) {
  if (cols != 24) throw ValidationError(std::string(what) + ": expected 24 hourly values");
}

}  // namespace

int DayProfiles::updates_per_horizon() const {
  return static_cast<int>(std::lround(horizon_seconds / update_seconds));
}

HorizonInput DayProfiles::horizon_input(const Network& net, Index slot, double price_p, double price_q) const {
  HorizonInput in;
  in.demand_p = VectorXd::Zero(static_cast<Index>(net.bus_count()));
  in.demand_q = in.demand_p;
  for (std::size_t k = 0; k < demand.buses.size(); ++k) {
    const auto i = static_cast<Index>(Network::index_of(demand.buses[k]));
    in.demand_p(i) = demand.p(static_cast<Index>(k), slot);
    in.demand_q(i) = demand.q(static_cast<Index>(k), slot);
  }
  in.wind_available = wind_forecast.col(slot);
  in.price_p = price_p;
  in.price_q = price_q;
  return in;
}

VectorXd DayProfiles::actual(Index horizon, int update) const {
  return wind_actual.col(horizon * updates_per_horizon() + update);
}

bool DayProfiles::operator==(const DayProfiles& o) const {
  return horizon_seconds == o.horizon_seconds && update_seconds == o.update_seconds &&
         generated_by == o.generated_by && demand.buses == o.demand.buses && demand.p == o.demand.p &&
         demand.q == o.demand.q && wind_forecast == o.wind_forecast && wind_actual == o.wind_actual;
}

void validate(const Network& net, const DayProfiles& pr, bool full_day) {
  if (!(pr.update_seconds > 0.0) || !(pr.horizon_seconds >= pr.update_seconds))
    throw ValidationError("profiles: need horizon_seconds >= update_seconds > 0");
  const int per = pr.updates_per_horizon();
  if (std::abs(per * pr.update_seconds - pr.horizon_seconds) > 1e-9)
    throw ValidationError("profiles: horizon must be a whole number of updates");

  const Index horizons = pr.wind_forecast.cols();
  if (horizons < 1) throw ValidationError("profiles: no horizon slots");
  if (full_day) {
    const double expected = kSecondsPerDay / pr.horizon_seconds;
    if (static_cast<double>(horizons) != expected)
      throw ValidationError("profiles: expected " + std::to_string(std::lround(expected)) + " horizon slots, found " +
                            std::to_string(horizons));
  }
  const auto stations = static_cast<Index>(net.station_count());
  if (pr.wind_forecast.rows() != stations || pr.wind_actual.rows() != stations)
    throw ValidationError("profiles: wind series need one row per station");
  if (pr.wind_actual.cols() != horizons * per)
    throw ValidationError("profiles: expected " + std::to_string(horizons * per) + " actual-wind slots, found " +
                          std::to_string(pr.wind_actual.cols()));

  const auto nb = static_cast<Index>(pr.demand.buses.size());
  if (pr.demand.p.rows() != nb || pr.demand.q.rows() != nb || pr.demand.p.cols() != horizons ||
      pr.demand.q.cols() != horizons)
    throw ValidationError("profiles: demand series need one row per demand bus and one column per horizon slot");
  for (std::size_t k = 0; k < pr.demand.buses.size(); ++k) {
    const BusId id = pr.demand.buses[k];
    if (id < 2 || id > static_cast<BusId>(net.bus_count()))
      throw ValidationError("profiles: demand bus " + std::to_string(id) + " is not a pq bus of the network");
    if (k > 0 && id <= pr.demand.buses[k - 1]) throw ValidationError("profiles: demand buses must be ascending");
  }
  auto nonneg = [](const MatrixXd& m) { return m.allFinite() && (m.array() >= 0.0).all(); };
  if (!nonneg(pr.demand.p) || !nonneg(pr.demand.q)) throw ValidationError("profiles: negative demand value");
  if (!nonneg(pr.wind_forecast) || !nonneg(pr.wind_actual)) throw ValidationError("profiles: negative wind value");
  for (Index s = 0; s < stations; ++s) {
    const double rated = net.stations[static_cast<std::size_t>(s)].rated_power;
    if (pr.wind_forecast.row(s).maxCoeff() > rated || pr.wind_actual.row(s).maxCoeff() > rated)
      throw ValidationError("profiles: wind above rated power at station bus " +
                            std::to_string(net.stations[static_cast<std::size_t>(s)].bus));
  }
}

VectorXd load_hourly_shape(const std::filesystem::path& path) {
  const Json root = detail::parse_json(detail::read_file(path), path.string());
  detail::require_object(root, "shape");
  detail::reject_unknown(root, "shape", {"note", "hourly_percent", "scale"});
  const Json& pct = detail::array(root, "hourly_percent", "shape");
  const double scale = detail::number_or(root, "scale", "shape", 1.0);
  VectorXd shape(static_cast<Index>(pct.size()));
  for (std::size_t h = 0; h < pct.size(); ++h) {
    if (!pct[h].is_number()) throw ParseError("shape.hourly_percent[" + std::to_string(h) + "]: expected a number");
    shape(static_cast<Index>(h)) = pct[h].get<double>() / 100.0 * scale;
  }
  check_hourly(shape.size(), "shape");
  if (!((shape.array() >= 0.0).all() && (shape.array() <= 1.0).all()))
    throw ValidationError("shape: values must lie in [0, 1] after scaling");
  return shape;
}

MatrixXd load_wind_base(const Network& net, const std::filesystem::path& path) {
  const Json root = detail::parse_json(detail::read_file(path), path.string());
  detail::require_object(root, "wind base");
  detail::reject_unknown(root, "wind base", {"note", "stations"});
  const Json& st = detail::field(root, "stations", "wind base");
  detail::require_object(st, "wind base.stations");
  MatrixXd base(static_cast<Index>(net.station_count()), 24);
  if (st.size() != net.station_count()) throw ValidationError("wind base: need exactly one series per station");
  for (std::size_t s = 0; s < net.station_count(); ++s) {
    const std::string key = std::to_string(net.stations[s].bus);
    const std::string where = "wind base.stations." + key;
    if (!st.contains(key)) throw ParseError(where + ": missing");
    const Json& row = st.at(key);
    if (!row.is_array()) throw ParseError(where + ": expected an array");
    check_hourly(static_cast<Index>(row.size()), where.c_str());
    for (std::size_t h = 0; h < 24; ++h) {
      if (!row[h].is_number()) throw ParseError(where + "[" + std::to_string(h) + "]: expected a number");
      const double w = row[h].get<double>();
      if (!(w >= 0.0 && w <= net.stations[s].rated_power))
        throw ValidationError(where + ": values must lie in [0, rated]");
      base(static_cast<Index>(s), static_cast<Index>(h)) = w;
    }
  }
  return base;
}

DemandProfile gen_demand(const VectorXd& shape, const Network& net, const ProfileGenConfig& cfg, int slots_per_hour) {
  validate(cfg);
  check_hourly(shape.size(), "demand shape");
  if (!((shape.array() >= 0.0).all() && (shape.array() <= 1.0).all()))
    throw ValidationError("demand shape: values must lie in [0, 1]");
  if (slots_per_hour < 1) throw ValidationError("demand: slots_per_hour must be >= 1");

  DemandProfile d;
  d.buses = net.demand_buses();
  const auto nb = static_cast<Index>(d.buses.size());
  const Index slots = 24 * slots_per_hour;
  d.p.resize(nb, slots);
  d.q.resize(nb, slots);
  for (Index k = 0; k < nb; ++k) {
    const Bus& bus = net.buses[Network::index_of(d.buses[static_cast<std::size_t>(k)])];
    for (Index t = 0; t < slots; ++t) {
      const auto hour = static_cast<std::uint32_t>(t / slots_per_hour);
      auto rng = stream(cfg.seed, demand_noise, static_cast<std::uint32_t>(bus.id), hour,
                        static_cast<std::uint32_t>(t % slots_per_hour));
      const double factor = shape(hour) * (1.0 + normal(rng, cfg.mu_d, cfg.sigma_d));
      d.p(k, t) = std::max(0.0, bus.demand_peak_p * factor);
      d.q(k, t) = std::max(0.0, bus.demand_peak_q * factor);
    }
  }
  return d;
}

MatrixXd gen_wind_forecast(const MatrixXd& base, const VectorXd& rated, const ProfileGenConfig& cfg,
                           int slots_per_hour) {
  validate(cfg);
  check_hourly(base.cols(), "wind base");
  if (rated.size() != base.rows()) throw ValidationError("wind base: one row per station required");
  if (slots_per_hour < 1) throw ValidationError("wind forecast: slots_per_hour must be >= 1");
  for (Index s = 0; s < base.rows(); ++s)
    if (!((base.row(s).array() >= 0.0).all() && (base.row(s).array() <= rated(s)).all()))
      throw ValidationError("wind base: values must lie in [0, rated]");

  MatrixXd out(base.rows(), 24 * slots_per_hour);
  for (Index s = 0; s < base.rows(); ++s) {
    const auto element = static_cast<std::uint32_t>(s + 1);
    for (Index h = 0; h < 24; ++h) {
      auto hour_rng = stream(cfg.seed, wind_hour, element, static_cast<std::uint32_t>(h), 0);
      const double hourly = base(s, h) * (1.0 + uniform(hour_rng, cfg.hourly_band));
      for (int k = 0; k < slots_per_hour; ++k) {
        auto rng = stream(cfg.seed, wind_slot, element, static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(k));
        const double w = hourly * (1.0 + normal(rng, cfg.mu_w, cfg.sigma_w));
        out(s, h * slots_per_hour + k) = std::clamp(w, 0.0, rated(s));
      }
    }
  }
  return out;
}

MatrixXd gen_actual_wind(const MatrixXd& forecast, const VectorXd& rated, const ProfileGenConfig& cfg,
                         int updates_per_slot) {
  validate(cfg);
  if (rated.size() != forecast.rows()) throw ValidationError("actual wind: one row per station required");
  if (updates_per_slot < 1) throw ValidationError("actual wind: updates_per_slot must be >= 1");
  MatrixXd out(forecast.rows(), forecast.cols() * updates_per_slot);
  for (Index s = 0; s < forecast.rows(); ++s) {
    for (Index t = 0; t < forecast.cols(); ++t) {
      for (int u = 0; u < updates_per_slot; ++u) {
        auto rng = stream(cfg.seed, wind_actual, static_cast<std::uint32_t>(s + 1), static_cast<std::uint32_t>(t),
                          static_cast<std::uint32_t>(u));
        const double w = forecast(s, t) * (1.0 + uniform(rng, cfg.hourly_band));
        out(s, t * updates_per_slot + u) = std::clamp(w, 0.0, rated(s));
      }
    }
  }
  return out;
}

DayProfiles generate_day(const Network& net, const VectorXd& shape, const MatrixXd& wind_base,
                         const ProfileGenConfig& cfg, double horizon_seconds, double update_seconds) {
  DayProfiles pr;
  pr.horizon_seconds = horizon_seconds;
  pr.update_seconds = update_seconds;
  const double per_hour = 3600.0 / horizon_seconds;
  if (!(horizon_seconds > 0.0) || per_hour != std::floor(per_hour))
    throw ValidationError("profiles: an hour must hold a whole number of horizons");
  const int slots_per_hour = static_cast<int>(per_hour);
  VectorXd rated(static_cast<Index>(net.station_count()));
  for (std::size_t s = 0; s < net.station_count(); ++s) rated(static_cast<Index>(s)) = net.stations[s].rated_power;

  pr.generated_by = cfg;
  pr.demand = gen_demand(shape, net, cfg, slots_per_hour);
  pr.wind_forecast = gen_wind_forecast(wind_base, rated, cfg, slots_per_hour);
  pr.wind_actual = gen_actual_wind(pr.wind_forecast, rated, cfg, pr.updates_per_horizon());
  validate(net, pr);
  return pr;
}

namespace {

Json matrix_json(const MatrixXd& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of rows");
  const std::size_t cols = j.empty() ? 0 : (j[0].is_array() ? j[0].size() : 0);
  MatrixXd m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string at = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) throw ParseError(at + ": expected an array");
    if (j[r].size() != cols) throw ValidationError(at + ": expected " + std::to_string(cols) + " values, found " +
                                                   std::to_string(j[r].size()));
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ParseError(at + "[" + std::to_string(c) + "]: expected a number");
      m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

}  // namespace

DayProfiles parse_profiles(const Network& net, const std::string& text) {
  const Json root = detail::parse_json(text, "profiles");
  detail::require_object(root, "profiles");
  detail::reject_unknown(root, "profiles",
                         {"meta", "demand_buses", "demand_p", "demand_q", "wind_forecast", "wind_actual"});
  DayProfiles pr;
  const Json& meta = detail::field(root, "meta", "profiles");
  detail::require_object(meta, "profiles.meta");
  detail::reject_unknown(meta, "profiles.meta", {"horizon_seconds", "update_seconds", "generator"});
  pr.horizon_seconds = detail::number(meta, "horizon_seconds", "profiles.meta");
  pr.update_seconds = detail::number(meta, "update_seconds", "profiles.meta");
  if (meta.contains("generator") && !meta.at("generator").is_null()) {
    const Json& g = meta.at("generator");
    const std::string where = "profiles.meta.generator";
    detail::require_object(g, where);
    detail::reject_unknown(g, where, {"seed", "mu_d", "sigma_d", "mu_w", "sigma_w", "hourly_band"});
    ProfileGenConfig cfg;
    const Json& seed = detail::field(g, "seed", where);
    if (!seed.is_number_unsigned()) throw ParseError(where + ".seed: expected a non-negative integer");
    cfg.seed = seed.get<std::uint64_t>();
    cfg.mu_d = detail::number(g, "mu_d", where);
    cfg.sigma_d = detail::number(g, "sigma_d", where);
    cfg.mu_w = detail::number(g, "mu_w", where);
    cfg.sigma_w = detail::number(g, "sigma_w", where);
    cfg.hourly_band = detail::number(g, "hourly_band", where);
    validate(cfg);
    pr.generated_by = cfg;
  }
  const Json& buses = detail::array(root, "demand_buses", "profiles");
  for (std::size_t k = 0; k < buses.size(); ++k) {
    if (!buses[k].is_number_integer()) throw ParseError("profiles.demand_buses[" + std::to_string(k) + "]: expected an integer");
    pr.demand.buses.push_back(buses[k].get<BusId>());
  }
  pr.demand.p = matrix_from(detail::field(root, "demand_p", "profiles"), "profiles.demand_p");
  pr.demand.q = matrix_from(detail::field(root, "demand_q", "profiles"), "profiles.demand_q");
  pr.wind_forecast = matrix_from(detail::field(root, "wind_forecast", "profiles"), "profiles.wind_forecast");
  pr.wind_actual = matrix_from(detail::field(root, "wind_actual", "profiles"), "profiles.wind_actual");
  validate(net, pr, false);  // shorter bundles are fine for replaying part of a day
  return pr;
}

DayProfiles load_profiles(const Network& net, const std::filesystem::path& path) {
  return parse_profiles(net, detail::read_file(path));
}

std::string serialize_profiles(const DayProfiles& pr) {
  Json meta = {{"horizon_seconds", pr.horizon_seconds}, {"update_seconds", pr.update_seconds}};
  if (pr.generated_by) {
    const ProfileGenConfig& c = *pr.generated_by;
    meta["generator"] = {{"seed", c.seed},       {"mu_d", c.mu_d},       {"sigma_d", c.sigma_d},
                         {"mu_w", c.mu_w},       {"sigma_w", c.sigma_w}, {"hourly_band", c.hourly_band}};
  }
  Json root = {{"meta", meta},
               {"demand_buses", pr.demand.buses},
               {"demand_p", matrix_json(pr.demand.p)},
               {"demand_q", matrix_json(pr.demand.q)},
               {"wind_forecast", matrix_json(pr.wind_forecast)},
               {"wind_actual", matrix_json(pr.wind_actual)}};
  return root.dump() + "\n";
}

void save_profiles(const DayProfiles& profiles, const std::filesystem::path& path) {
  detail::write_file(path, serialize_profiles(profiles));
}

std::string demand_csv(const DayProfiles& pr) {
  std::vector<std::string> header{"slot", "time_s", "total_p", "total_q"};
  for (BusId b : pr.demand.buses) header.push_back("p_" + std::to_string(b));
  for (BusId b : pr.demand.buses) header.push_back("q_" + std::to_string(b));
  CsvWriter csv(header);
  for (Index t = 0; t < pr.demand.p.cols(); ++t) {
    csv.cell(static_cast<long long>(t)).cell(static_cast<double>(t) * pr.horizon_seconds);
    csv.cell(pr.demand.p.col(t).sum()).cell(pr.demand.q.col(t).sum());
    for (Index k = 0; k < pr.demand.p.rows(); ++k) csv.cell(pr.demand.p(k, t));
    for (Index k = 0; k < pr.demand.q.rows(); ++k) csv.cell(pr.demand.q(k, t));
    csv.end_row();
  }
  return csv.str();
}

std::string wind_csv(const Network& net, const DayProfiles& pr) {
  std::vector<std::string> header{"update_slot", "time_s"};
  for (const auto& st : net.stations) header.push_back("forecast_" + std::to_string(st.bus));
  for (const auto& st : net.stations) header.push_back("actual_" + std::to_string(st.bus));
  CsvWriter csv(header);
  const int per = pr.updates_per_horizon();
  for (Index t = 0; t < pr.wind_actual.cols(); ++t) {
    csv.cell(static_cast<long long>(t)).cell(static_cast<double>(t) * pr.update_seconds);
    for (Index s = 0; s < pr.wind_forecast.rows(); ++s) csv.cell(pr.wind_forecast(s, t / per));
    for (Index s = 0; s < pr.wind_actual.rows(); ++s) csv.cell(pr.wind_actual(s, t));
    csv.end_row();
  }
  return csv.str();
}

}  // namespace rtopf
