#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "wlanassoc/mac.hpp"
#include "wlanassoc/phy.hpp"
#include "wlanassoc/topology.hpp"

namespace wlanassoc {

/// How many STAs one AP may take in the assignment.
enum class CapacityMode {
  uncapped,  // every STA may pick its best AP
  balanced,  // ceil(N/M) STAs per AP
};

struct AssociationParams {
  double sinr_threshold_db = 0.0;  // gamma; edges below it are unservable
  bool sinr_filter = true;
  int weight_iterations = 1;
  CapacityMode capacity = CapacityMode::uncapped;
  bool shuffle_arrivals = false;  // sequential baselines: STA index order unless set
};

/// Node placement: Poisson counts from the intensities, or fixed counts
/// (network-size sweeps). Positions are uniform either way.
struct Placement {
  bool fixed_counts = false;
  std::size_t n_sta = 100;
  std::size_t n_ap = 20;
};

struct Scenario {
  Area area;
  Intensities intensities;
  Placement placement;
  RadioParams radio;
  MacParams mac;
  FairnessParams fairness;
  AssociationParams association;
  int num_tx = 4;  // U
  int num_rx = 8;  // K
  bool literal_sinr = false;
  // STAs of one BSS never transmit concurrently: the AP answers one RTS at a
  // time. Without it, contention is purely by carrier sensing.
  bool bss_contention = true;

  PhyParams phy() const {
    PhyParams p = PhyParams::from_radio(radio, num_tx, num_rx);
    p.literal_sinr = literal_sinr;
    return p;
  }

  double sinr_threshold() const { return db_to_linear(association.sinr_threshold_db); }
};

inline NetworkGeometry make_geometry(const Scenario& s, std::uint64_t seed) {
  if (s.placement.fixed_counts) return generate_uniform(s.placement.n_sta, s.placement.n_ap, s.area, seed);
  return generate_ppp(s.intensities, s.area, seed);
}

inline void validate(const Scenario& s) {
  if (!(s.area.width_m > 0.0) || !(s.area.height_m > 0.0)) throw std::invalid_argument("area dimensions must be > 0");
  if (s.intensities.eta_n < 0.0) throw std::invalid_argument("density.eta_n must be >= 0");
  if (s.intensities.eta_m < 0.0) throw std::invalid_argument("density.eta_m must be >= 0");
  if (!(s.intensities.n_ref > 0.0)) throw std::invalid_argument("density.n_ref must be > 0");
  validate(s.radio);
  validate(s.mac);
  if (s.fairness.delta < 0.0) throw std::invalid_argument("association.delta must be >= 0");
  if (s.association.weight_iterations < 1) throw std::invalid_argument("association.weight_iterations must be >= 1");
  validate(s.phy());
}

}  // namespace wlanassoc
