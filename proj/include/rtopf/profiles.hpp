#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rtopf/network.hpp"
#include "rtopf/opf.hpp"

namespace rtopf {

inline constexpr double kSecondsPerDay = 86400.0;

/// Noise settings of the synthetic day. Both normal noises are relative to the
/// hourly value; `hourly_band` is the half-width of the uniform wind perturbation
/// used per hour for the forecast and per update for the actual wind.
struct ProfileGenConfig {
  double mu_d = 0.0;
  double sigma_d = 0.01;
  double mu_w = 0.0;
  double sigma_w = 0.1;
  double hourly_band = 0.15;
  std::uint64_t seed = 1;

  bool operator==(const ProfileGenConfig&) const = default;
};

void validate(const ProfileGenConfig& cfg);

struct DemandProfile {
  std::vector<BusId> buses;  // demand-bus set, ascending
  Eigen::MatrixXd p;         // MW, bus x horizon slot
  Eigen::MatrixXd q;         // Mvar
};

/**
 * Demand, forecast and actual wind for one day. Demand and forecast hold one
 * column per horizon slot, actual wind one column per update slot.
 */
struct DayProfiles {
  double horizon_seconds = 120.0;
  double update_seconds = 20.0;
  std::optional<ProfileGenConfig> generated_by;
  DemandProfile demand;
  Eigen::MatrixXd wind_forecast;  // MW, station x horizon slot
  Eigen::MatrixXd wind_actual;    // MW, station x update slot

  Eigen::Index horizons() const { return wind_forecast.cols(); }
  int updates_per_horizon() const;

  /// Demand and forecast of one horizon slot as an OPF input.
  HorizonInput horizon_input(const Network& net, Eigen::Index slot, double price_p = 1.67,
                             double price_q = 0.4) const;
  Eigen::VectorXd actual(Eigen::Index horizon, int update) const;

  bool operator==(const DayProfiles& o) const;
};

/// Shapes and bounds. With `full_day` the slot counts must cover exactly 24 h.
void validate(const Network& net, const DayProfiles& profiles, bool full_day = true);

/// 24 per-unit hourly demand values in [0, 1].
Eigen::VectorXd load_hourly_shape(const std::filesystem::path& path);
/// Base hourly wind (station x 24, MW) keyed by station bus.
Eigen::MatrixXd load_wind_base(const Network& net, const std::filesystem::path& path);

/// value = shape[hour] * peak * (1 + N(mu_d, sigma_d)), one draw per bus and slot
/// shared by P and Q, clamped at 0.
DemandProfile gen_demand(const Eigen::VectorXd& hourly_shape, const Network& net, const ProfileGenConfig& cfg,
                         int slots_per_hour = 30);

/// base[hour] * (1 + U(-band, band)) per station and hour, then * (1 + N(mu_w, sigma_w)) per slot,
/// clamped to [0, rated].
Eigen::MatrixXd gen_wind_forecast(const Eigen::MatrixXd& base_hourly, const Eigen::VectorXd& rated,
                                  const ProfileGenConfig& cfg, int slots_per_hour = 30);

/// forecast parent * (1 + U(-band, band)) per update slot, clamped to [0, rated].
Eigen::MatrixXd gen_actual_wind(const Eigen::MatrixXd& forecast, const Eigen::VectorXd& rated,
                                const ProfileGenConfig& cfg, int updates_per_slot = 6);

DayProfiles generate_day(const Network& net, const Eigen::VectorXd& hourly_shape, const Eigen::MatrixXd& wind_base,
                         const ProfileGenConfig& cfg, double horizon_seconds = 120.0, double update_seconds = 20.0);

DayProfiles parse_profiles(const Network& net, const std::string& text);
DayProfiles load_profiles(const Network& net, const std::filesystem::path& path);
std::string serialize_profiles(const DayProfiles& profiles);
void save_profiles(const DayProfiles& profiles, const std::filesystem::path& path);

/// Per-series CSV exports: slot, time_s, then one column per bus / station.
std::string demand_csv(const DayProfiles& profiles);
std::string wind_csv(const Network& net, const DayProfiles& profiles);

}  // namespace rtopf
