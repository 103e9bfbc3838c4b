#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wlanassoc/common.hpp"

namespace wlanassoc {

struct MacParams {
  double payload_bits = 1500.0 * 8.0;
  double header_bits = 22.0 * 8.0;
  double sifs_s = 10e-6;
  double slot_time_s = 20e-6;
  double ack_s = 64e-6;
  double difs_s = 10e-6 + 2.0 * 20e-6;
  int cw_min = 32;
  int cw_max = 1024;
  int mcs_order = 2;  // BPSK
  // RTS + CTS at the 6 Mb/s basic rate (20 B + 14 B) plus the two SIFS gaps
  // that separate them from the data frame.
  double rts_cts_overhead_s = (20.0 + 14.0) * 8.0 / 6e6 + 2.0 * 10e-6;

  double frame_bits() const { return payload_bits + header_bits; }
};

inline void validate(const MacParams& m) {
  if (!(m.sifs_s > 0.0)) throw std::invalid_argument("mac.sifs must be > 0");
  if (!(m.slot_time_s > 0.0)) throw std::invalid_argument("mac.slot_time must be > 0");
  if (!(m.ack_s > 0.0)) throw std::invalid_argument("mac.ack must be > 0");
  if (!(m.difs_s > 0.0)) throw std::invalid_argument("mac.difs must be > 0");
  if (!(m.payload_bits > 0.0)) throw std::invalid_argument("mac.payload must be > 0");
  if (m.header_bits < 0.0) throw std::invalid_argument("mac.header must be >= 0");
  if (m.rts_cts_overhead_s < 0.0) throw std::invalid_argument("mac.rts_cts_overhead must be >= 0");
  if (m.cw_min < 1 || m.cw_min > m.cw_max) throw std::invalid_argument("mac.cw_min must be in [1, cw_max]");
  if (m.mcs_order < 2 || (m.mcs_order & (m.mcs_order - 1)) != 0)
    throw std::invalid_argument("mac.mcs_order must be a power of two >= 2");
}

struct FairnessParams {
  double delta = 0.5;
};

/// Airtime of a frame. A zero-rate link never finishes: +inf.
inline double frame_time(double frame_bits, double rate_bps) {
  if (frame_bits == 0.0) return 0.0;
  if (!(rate_bps > 0.0)) return std::numeric_limits<double>::infinity();
  return frame_bits / rate_bps;
}

/// DIFS + SIFS + backoff (half the maximum window) + ACK.
inline double mac_delay(const MacParams& m) {
  const double backoff = 0.5 * static_cast<double>(m.cw_max) * m.slot_time_s;
  return m.difs_s + m.sifs_s + backoff + m.ack_s;
}

/// Per-exchange delay charged by the simulator and the weight model: the MAC
/// delay plus the fixed RTS/CTS handshake.
inline double exchange_delay(const MacParams& m) { return mac_delay(m) + m.rts_cts_overhead_s; }

inline double effective_throughput(double t_frame, double tau, int mcs_order) {
  if (!(t_frame + tau > 0.0)) throw std::invalid_argument("effective_throughput: t + tau must be > 0");
  if (std::isinf(t_frame)) return 0.0;
  return std::log2(static_cast<double>(mcs_order)) / (t_frame + tau);
}

/// Conventional goodput of one payload per exchange, in bit/s.
inline double goodput_bps(double payload_bits, double t_frame, double tau) {
  if (std::isinf(t_frame)) return 0.0;
  return payload_bits / (t_frame + tau);
}

/// Fairness-parameterized throughput utility: log(beta) at delta = 1 and
/// beta^(1-delta)/(1-delta) otherwise. Links that cannot produce a finite
/// utility map to kUnservable.
inline double utility(double beta, const FairnessParams& f) {
  if (f.delta < 0.0) throw std::invalid_argument("fairness delta must be >= 0");
  if (f.delta == 1.0) return beta > 0.0 ? std::log(beta) : kUnservable;
  if (beta <= 0.0 && f.delta > 1.0) return kUnservable;
  if (beta < 0.0) return kUnservable;
  const double e = 1.0 - f.delta;
  return std::pow(beta, e) / e;
}

/// The alpha-fair family with the customary -1 shift, which is continuous at
/// delta = 1.
inline double utility_shifted(double beta, const FairnessParams& f) {
  if (f.delta == 1.0) return beta > 0.0 ? std::log(beta) : kUnservable;
  const double e = 1.0 - f.delta;
  return (std::pow(beta, e) - 1.0) / e;
}

}  // namespace wlanassoc
