#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

#include "wlanassoc/common.hpp"
#include "wlanassoc/topology.hpp"

namespace wlanassoc {

using CMatrix = Eigen::MatrixXcd;

/// Narrowband MIMO channel between one STA and one AP.
///
/// Stored receive-side tall: K rows (AP receive antennas) by U columns (STA
/// transmit antennas), so entry (k, u) is the gain from transmit antenna u to
/// receive antenna k. With this orientation H^H H is U x U and invertible for
/// K >= U.
struct ChannelMatrix {
  CMatrix entries;

  Eigen::Index num_rx() const { return entries.rows(); }
  Eigen::Index num_tx() const { return entries.cols(); }
};

/// Zero-forcing weights W = (H^H H)^-1 H^H, U x K.
struct Beamformer {
  CMatrix weights;
  double conditioning = 1.0;  // condition number of H^H H
  bool regularized = false;   // true when the inverse was diagonally loaded
};

struct PhyParams {
  double symbol_energy = dbm_to_mw(12.0);  // E_x, mW
  int num_tx = 4;                          // U
  int num_rx = 8;                          // K
  double noise_variance = dbm_to_mw(-100.0);
  double bandwidth_hz = 20e6;
  // Reproduce the printed SINR expression, which multiplies the desired
  // power by sqrt(E_x/U) and leaves interference unscaled.
  bool literal_sinr = false;

  static PhyParams from_radio(const RadioParams& radio, int num_tx, int num_rx) {
    PhyParams p;
    p.symbol_energy = dbm_to_mw(radio.tx_power_dbm);
    p.num_tx = num_tx;
    p.num_rx = num_rx;
    p.noise_variance = radio.noise_power_mw();
    p.bandwidth_hz = radio.bandwidth_hz;
    return p;
  }
};

inline void validate(const PhyParams& p) {
  if (p.num_tx < 1) throw std::invalid_argument("phy.num_tx (U) must be >= 1");
  if (p.num_rx < p.num_tx) throw std::invalid_argument("phy.num_rx (K) must be >= num_tx (U) for zero forcing");
  if (!(p.noise_variance > 0.0)) throw std::invalid_argument("phy.noise_variance must be > 0");
  if (!(p.symbol_energy >= 0.0)) throw std::invalid_argument("phy.symbol_energy must be >= 0");
}

/// Condition-number ceiling above which the ZF inverse is regularized.
inline constexpr double kMaxConditioning = 1e10;

/// Circularly-symmetric Gaussian small-scale fading scaled to the given
/// linear large-scale gain. The fading draw depends only on the seed, so
/// re-drawing with a new gain and the same seed rescales the same channel.
inline ChannelMatrix draw_channel(double large_scale_gain, const PhyParams& phy, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  const double amp = std::sqrt(large_scale_gain / 2.0);
  ChannelMatrix h{CMatrix(phy.num_rx, phy.num_tx)};
  for (int k = 0; k < phy.num_rx; ++k)
    for (int u = 0; u < phy.num_tx; ++u) {
      const double re = n01(rng);
      const double im = n01(rng);
      h.entries(k, u) = {amp * re, amp * im};
    }
  return h;
}

inline ChannelMatrix draw_channel(std::size_t sta, std::size_t ap, const NetworkGeometry& g,
                                  const RadioParams& radio, const PhyParams& phy, std::uint64_t seed) {
  if (sta >= g.num_stas() || ap >= g.num_aps()) throw std::out_of_range("draw_channel: index out of range");
  const double gain = large_scale_gain(distance(g.sta_positions[sta], g.ap_positions[ap]), radio);
  return draw_channel(gain, phy, derive_seed(seed, {sta, ap}));
}

inline Beamformer zf_beamformer(const ChannelMatrix& h) {
  const CMatrix& H = h.entries;
  const Eigen::Index u = H.cols();
  const CMatrix gram = H.adjoint() * H;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();

  Beamformer bf;
  bf.conditioning = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (bf.conditioning <= kMaxConditioning) {
    bf.weights = gram.llt().solve(H.adjoint());
    return bf;
  }
  bf.regularized = true;
  const double eps = 1e-6 * gram.trace().real() / static_cast<double>(u);
  if (!(eps > 0.0)) {
    bf.weights = CMatrix::Zero(u, H.rows());
    return bf;
  }
  const CMatrix loaded = gram + eps * CMatrix::Identity(u, u);
  bf.weights = loaded.ldlt().solve(H.adjoint());
  return bf;
}

namespace detail {

inline double desired_scale(const PhyParams& p) {
  const double s = p.symbol_energy / static_cast<double>(p.num_tx);
  return p.literal_sinr ? std::sqrt(s) : s;
}

inline double interference_scale(const PhyParams& p) {
  return p.literal_sinr ? 1.0 : p.symbol_energy / static_cast<double>(p.num_tx);
}

}  // namespace detail

/// Signal power after the desired link's own beamformer.
inline double desired_power(const Beamformer& w, const ChannelMatrix& h, const PhyParams& p) {
  return detail::desired_scale(p) * (w.weights * h.entries).squaredNorm();
}

inline double noise_power(const Beamformer& w, const PhyParams& p) {
  return w.weights.squaredNorm() * p.noise_variance;
}

/// Power contributed at a victim AP by interferer z: z's own beamformer
/// (computed for its serving AP) applied to z's cross channel to the victim AP.
inline double interference_power(const Beamformer& own, const ChannelMatrix& cross, const PhyParams& p) {
  return detail::interference_scale(p) * (own.weights * cross.entries).squaredNorm();
}

struct Interferer {
  const Beamformer& beamformer;      // z's beamformer toward its own AP
  const ChannelMatrix& cross_channel; // z to the desired link's AP
};

inline double compute_sinr(const Beamformer& w, const ChannelMatrix& h, std::span<const Interferer> interferers,
                           const PhyParams& p) {
  double denom = noise_power(w, p);
  for (const auto& z : interferers) denom += interference_power(z.beamformer, z.cross_channel, p);
  return desired_power(w, h, p) / denom;
}

inline double channel_rate(double sinr, double bandwidth_hz) {
  if (!(sinr >= 0.0)) throw std::invalid_argument("channel_rate: sinr must be >= 0");
  return bandwidth_hz * std::log2(1.0 + sinr);
}

}  // namespace wlanassoc
