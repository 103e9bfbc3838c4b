#pragma once

// Physical state of one network realization: geometry, candidate sets, all
// STA-AP channels, zero-forcing beamformers on candidate links and the
// precomputed power terms the association and simulator layers share.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "wlanassoc/phy.hpp"
#include "wlanassoc/scenario.hpp"
#include "wlanassoc/topology.hpp"

namespace wlanassoc {

struct Transmission {
  std::size_t sta = 0;
  std::size_t ap = 0;
};

class Network {
 public:
  Network(NetworkGeometry geometry, const Scenario& scenario, std::uint64_t channel_seed)
      : geometry_(std::move(geometry)), phy_(scenario.phy()), radio_(scenario.radio) {
    validate(phy_);
    n_ = geometry_.num_stas();
    m_ = geometry_.num_aps();
    rss_.resize(n_ * m_);
    slot_.assign(n_ * m_, -1);
    candidates_.resize(n_);
    channels_.resize(n_ * m_);
    beamformers_.resize(n_ * m_);
    desired_.assign(n_ * m_, 0.0);
    noise_.assign(n_ * m_, 0.0);
    cross_.resize(n_);

    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) {
        const double d = distance(geometry_.sta_positions[i], geometry_.ap_positions[j]);
        rss_[i * m_ + j] = rss_dbm(radio_.tx_power_dbm, d, radio_);
        channels_[i * m_ + j] = draw_channel(i, j, geometry_, radio_, phy_, channel_seed);
      }
      candidates_[i] = candidate_aps(i, geometry_, radio_);
      for (std::size_t c = 0; c < candidates_[i].size(); ++c) {
        const std::size_t j = candidates_[i][c];
        slot_[i * m_ + j] = static_cast<int>(c);
        auto& bf = beamformers_[i * m_ + j];
        bf = zf_beamformer(channels_[i * m_ + j]);
        desired_[i * m_ + j] = desired_power(bf, channels_[i * m_ + j], phy_);
        noise_[i * m_ + j] = noise_power(bf, phy_);
      }
      cross_[i].resize(candidates_[i].size() * m_);
      for (std::size_t c = 0; c < candidates_[i].size(); ++c) {
        const auto& bf = beamformers_[i * m_ + candidates_[i][c]];
        for (std::size_t j = 0; j < m_; ++j)
          cross_[i][c * m_ + j] = interference_power(bf, channels_[i * m_ + j], phy_);
      }
    }

    const double csr = effective_csr_m(radio_);
    senses_.assign(n_ * n_, 0);
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = a; b < n_; ++b) {
        const bool s = distance(geometry_.sta_positions[a], geometry_.sta_positions[b]) <= csr;
        senses_[a * n_ + b] = senses_[b * n_ + a] = s;
      }
  }

  const NetworkGeometry& geometry() const { return geometry_; }
  const PhyParams& phy() const { return phy_; }
  const RadioParams& radio() const { return radio_; }
  std::size_t num_stas() const { return n_; }
  std::size_t num_aps() const { return m_; }

  const std::vector<std::size_t>& candidates(std::size_t i) const { return candidates_.at(i); }
  bool is_candidate(std::size_t i, std::size_t j) const { return slot_[i * m_ + j] >= 0; }
  bool covered(std::size_t i) const { return !candidates_.at(i).empty(); }

  double rss(std::size_t i, std::size_t j) const { return rss_[i * m_ + j]; }
  const ChannelMatrix& channel(std::size_t i, std::size_t j) const { return channels_.at(i * m_ + j); }
  const Beamformer& beamformer(std::size_t i, std::size_t j) const {
    require_candidate(i, j);
    return beamformers_[i * m_ + j];
  }
  double desired(std::size_t i, std::size_t j) const {
    require_candidate(i, j);
    return desired_[i * m_ + j];
  }
  double noise(std::size_t i, std::size_t j) const {
    require_candidate(i, j);
    return noise_[i * m_ + j];
  }
  /// Power STA z leaks into AP j while transmitting to its own AP a.
  double cross(std::size_t z, std::size_t a, std::size_t j) const {
    require_candidate(z, a);
    return cross_[z][static_cast<std::size_t>(slot_[z * m_ + a]) * m_ + j];
  }
  /// STAs a and b are within carrier-sensing range of each other.
  bool senses(std::size_t a, std::size_t b) const { return senses_[a * n_ + b] != 0; }

  double sinr(std::size_t i, std::size_t j, std::span<const Transmission> interferers) const {
    double denom = noise(i, j);
    for (const auto& t : interferers)
      if (t.sta != i) denom += cross(t.sta, t.ap, j);
    return desired(i, j) / denom;
  }

 private:
  void require_candidate(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= m_) throw std::out_of_range("Network: index out of range");
    if (slot_[i * m_ + j] < 0) throw std::invalid_argument("Network: AP is not a candidate of this STA");
  }

  NetworkGeometry geometry_;
  PhyParams phy_;
  RadioParams radio_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<double> rss_;
  std::vector<int> slot_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::vector<ChannelMatrix> channels_;
  std::vector<Beamformer> beamformers_;
  std::vector<double> desired_;
  std::vector<double> noise_;
  std::vector<std::vector<double>> cross_;
  std::vector<char> senses_;
};

}  // namespace wlanassoc
