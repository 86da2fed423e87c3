#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rtopf {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using AdmittanceMatrix = MatrixX<std::complex<Scalar>>;

using BusId = int;

enum class BusKind { slack, pq };

struct Bus {
  BusId id = 0;
  BusKind kind = BusKind::pq;
  double v_min = 0.95;  // pu
  double v_max = 1.05;  // pu
  double demand_peak_p = 0.0;  // MW
  double demand_peak_q = 0.0;  // Mvar

  bool operator==(const Bus&) const = default;
};

// Pi-model line section. Impedances and total charging susceptance in per-unit,
// thermal limit in MVA.
struct Branch {
  BusId from_bus = 0;
  BusId to_bus = 0;
  double resistance = 0.0;
  double reactance = 0.0;
  double shunt_susceptance_total = 0.0;
  double s_l_max = 0.0;

  bool operator==(const Branch&) const = default;
};

// Unity power factor is the only supported mode, so there is no field for it.
struct WindStation {
  BusId bus = 0;
  double rated_power = 0.0;  // MW

  bool operator==(const WindStation&) const = default;
};

/**
 * Radial (or meshed) distribution network in per-unit.
 *
 * Buses are stored ordered by id and ids run 1..N, so a bus with id `k` lives at
 * position `k - 1` in every per-bus vector used by the solvers. Bus 1 is the
 * slack bus with its voltage fixed at 1.0 pu and zero angle.
 */
struct Network {
  std::string name;
  std::string note;
  double base_mva = 10.0;
  double base_kv = 27.6;
  double s_s_max = 0.0;  // MVA at the substation
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<WindStation> stations;

  static constexpr double kSlackVoltage = 1.0;
  static constexpr double kSlackAngle = 0.0;

  std::size_t bus_count() const { return buses.size(); }
  std::size_t station_count() const { return stations.size(); }
  static std::size_t index_of(BusId id) { return static_cast<std::size_t>(id - 1); }

  /// Ids of buses with a nonzero peak demand (the demand-bus set).
  std::vector<BusId> demand_buses() const;
  /// Ids of wind-station buses in station order.
  std::vector<BusId> station_buses() const;

  bool operator==(const Network&) const = default;
};

/// Checks every structural invariant; throws ValidationError naming the first violation.
void validate(const Network& net);

/// Parses the JSON case format. Throws ParseError or ValidationError.
Network parse_network(const std::string& text);
Network load_network(const std::filesystem::path& path);

std::string serialize_network(const Network& net);
void save_network(const Network& net, const std::filesystem::path& path);

/**
 * Bus admittance matrix of the pi-model network, in per-unit.
 *
 * Each branch adds its series admittance y = 1/(r + jx) to both diagonal entries
 * and -y to the two off-diagonal entries, and half its total charging
 * susceptance to each end.
 */
template <typename Scalar = double>
AdmittanceMatrix<Scalar> build_admittance(const Network& net) {
  using Complex = std::complex<Scalar>;
  const auto n = static_cast<Eigen::Index>(net.bus_count());
  AdmittanceMatrix<Scalar> y = AdmittanceMatrix<Scalar>::Zero(n, n);
  for (const Branch& br : net.branches) {
    const auto f = static_cast<Eigen::Index>(Network::index_of(br.from_bus));
    const auto t = static_cast<Eigen::Index>(Network::index_of(br.to_bus));
    const Complex series = Complex(Scalar(1)) / Complex(Scalar(br.resistance), Scalar(br.reactance));
    const Complex half_shunt(Scalar(0), Scalar(br.shunt_susceptance_total) / Scalar(2));
    y(f, f) += series + half_shunt;
    y(t, t) += series + half_shunt;
    y(f, t) -= series;
    y(t, f) -= series;
  }
  return y;
}

}  // namespace rtopf
