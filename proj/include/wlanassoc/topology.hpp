#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "wlanassoc/common.hpp"

namespace wlanassoc {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Area {
  double width_m = 200.0;
  double height_m = 200.0;

  bool contains(Position p) const {
    return p.x >= 0.0 && p.x <= width_m && p.y >= 0.0 && p.y <= height_m;
  }
};

struct NetworkGeometry {
  Area area;
  std::vector<Position> ap_positions;
  std::vector<Position> sta_positions;
  // Set when the Poisson draw produced zero APs and one AP was forced.
  bool ap_count_adjusted = false;

  std::size_t num_aps() const { return ap_positions.size(); }
  std::size_t num_stas() const { return sta_positions.size(); }
};

/// How the carrier-sensing range is obtained.
enum class CsrMode {
  fixed,         // csr_m taken as configured (80 m by default)
  cca_derived,   // distance at which the path-loss model puts RSS at the CCA threshold
};

struct RadioParams {
  double tx_power_dbm = 12.0;
  // -100 dBm of noise across the 20 MHz channel.
  double noise_floor_dbm_per_hz = -100.0 - 10.0 * std::log10(20e6);
  double bandwidth_hz = 20e6;
  double pathloss_exponent = 3.4;
  double reference_distance_m = 1.0;
  double reference_loss_db = 40.05;  // free space at 1 m, 2.4 GHz
  double cca_threshold_dbm = -70.0;
  double receiver_sensitivity_dbm = -75.0;
  double csr_m = 80.0;
  CsrMode csr_mode = CsrMode::fixed;

  double noise_power_dbm() const { return noise_floor_dbm_per_hz + 10.0 * std::log10(bandwidth_hz); }
  double noise_power_mw() const { return dbm_to_mw(noise_power_dbm()); }
};

struct Intensities {
  double eta_n = 0.8;
  double eta_m = 0.2;
  double n_ref = 200.0;
};

inline double free_space_loss_db(double frequency_hz, double distance_m) {
  constexpr double kSpeedOfLight = 299'792'458.0;
  constexpr double kPi = 3.14159265358979323846;
  return 20.0 * std::log10(4.0 * kPi * distance_m * frequency_hz / kSpeedOfLight);
}

inline double pathloss_db(double distance_m, const RadioParams& radio) {
  const double d = std::max(distance_m, radio.reference_distance_m);
  return radio.reference_loss_db +
         10.0 * radio.pathloss_exponent * std::log10(d / radio.reference_distance_m);
}

/// Log-distance received power. Distances below the reference distance are
/// clamped to it.
inline double rss_dbm(double tx_dbm, double distance_m, const RadioParams& radio) {
  return tx_dbm - pathloss_db(distance_m, radio);
}

/// Linear power gain of the large-scale channel (no fading).
inline double large_scale_gain(double distance_m, const RadioParams& radio) {
  return db_to_linear(-pathloss_db(distance_m, radio));
}

/// Distance at which a transmitter at tx_power_dbm is received at the CCA threshold.
inline double cca_range_m(const RadioParams& radio) {
  const double budget = radio.tx_power_dbm - radio.reference_loss_db - radio.cca_threshold_dbm;
  return radio.reference_distance_m * std::pow(10.0, budget / (10.0 * radio.pathloss_exponent));
}

inline double effective_csr_m(const RadioParams& radio) {
  return radio.csr_mode == CsrMode::fixed ? radio.csr_m : cca_range_m(radio);
}

inline bool in_csr(Position a, Position b, const RadioParams& radio) {
  return distance(a, b) <= effective_csr_m(radio);
}

inline void validate(const RadioParams& radio) {
  if (!(radio.pathloss_exponent >= 2.0)) throw std::invalid_argument("radio.pathloss_exponent must be >= 2");
  if (!(radio.csr_m > 0.0)) throw std::invalid_argument("radio.csr_m must be > 0");
  if (!(radio.reference_distance_m > 0.0)) throw std::invalid_argument("radio.reference_distance_m must be > 0");
  if (!(radio.bandwidth_hz > 0.0)) throw std::invalid_argument("radio.bandwidth_hz must be > 0");
}

namespace detail {

inline std::size_t poisson_count(double mean, std::mt19937_64& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<long long> dist(mean);
  return static_cast<std::size_t>(dist(rng));
}

inline Position uniform_position(const Area& area, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(0.0, area.width_m);
  std::uniform_real_distribution<double> uy(0.0, area.height_m);
  const double x = ux(rng);
  return {x, uy(rng)};
}

}  // namespace detail

/// Places APs and STAs as homogeneous Poisson point processes over the area.
/// Counts are Poisson with means eta * n_ref; positions are i.i.d. uniform.
inline NetworkGeometry generate_ppp(const Intensities& in, const Area& area, std::uint64_t seed) {
  if (!(area.width_m > 0.0) || !(area.height_m > 0.0))
    throw std::invalid_argument("area dimensions must be positive");
  if (in.eta_n < 0.0 || in.eta_m < 0.0) throw std::invalid_argument("intensities must be non-negative");

  std::mt19937_64 rng(seed);
  NetworkGeometry g;
  g.area = area;
  const std::size_t n = detail::poisson_count(in.eta_n * in.n_ref, rng);
  std::size_t m = detail::poisson_count(in.eta_m * in.n_ref, rng);
  if (m == 0) {
    m = 1;
    g.ap_count_adjusted = true;
  }
  g.ap_positions.reserve(m);
  for (std::size_t j = 0; j < m; ++j) g.ap_positions.push_back(detail::uniform_position(area, rng));
  g.sta_positions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) g.sta_positions.push_back(detail::uniform_position(area, rng));
  return g;
}

/// Same placement law with fixed node counts (network-size sweeps).
inline NetworkGeometry generate_uniform(std::size_t n_sta, std::size_t n_ap, const Area& area,
                                        std::uint64_t seed) {
  if (!(area.width_m > 0.0) || !(area.height_m > 0.0))
    throw std::invalid_argument("area dimensions must be positive");
  std::mt19937_64 rng(seed);
  NetworkGeometry g;
  g.area = area;
  if (n_ap == 0) {
    n_ap = 1;
    g.ap_count_adjusted = true;
  }
  for (std::size_t j = 0; j < n_ap; ++j) g.ap_positions.push_back(detail::uniform_position(area, rng));
  for (std::size_t i = 0; i < n_sta; ++i) g.sta_positions.push_back(detail::uniform_position(area, rng));
  return g;
}

/// APs whose RSS at the STA reaches the receiver sensitivity, strongest first.
/// Equal RSS keeps the lower AP index first.
inline std::vector<std::size_t> candidate_aps(std::size_t sta, const NetworkGeometry& g,
                                              const RadioParams& radio) {
  if (sta >= g.num_stas()) throw std::out_of_range("candidate_aps: STA index out of range");
  std::vector<std::size_t> out;
  std::vector<double> rss(g.num_aps());
  for (std::size_t j = 0; j < g.num_aps(); ++j) {
    rss[j] = rss_dbm(radio.tx_power_dbm, distance(g.sta_positions[sta], g.ap_positions[j]), radio);
    if (rss[j] >= radio.receiver_sensitivity_dbm) out.push_back(j);
  }
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return rss[a] > rss[b]; });
  return out;
}

}  // namespace wlanassoc
