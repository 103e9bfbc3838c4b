#pragma once

// Round-based CSMA/CA engine. One "slot" below is one channel-access round:
// backlogged STAs count down their backoff, the earliest ones seize the
// medium, everyone within carrier-sensing range of a transmitter defers, and
// STAs that hear no one transmit concurrently. A round lasts the per-exchange
// delay plus the longest frame on the air.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "wlanassoc/association.hpp"
#include "wlanassoc/network.hpp"
#include "wlanassoc/scenario.hpp"
#include "wlanassoc/stats.hpp"

namespace wlanassoc {

struct SimParams {
  std::size_t n_slots = 1000;
  std::size_t n_realizations = 200;
  double arrival_rate = 1.0;  // packets per slot time per STA
  std::size_t buffer_limit = 1000;
  int retry_limit = 7;
  double decode_threshold_db = 0.0;
  std::uint64_t base_seed = 1;
  unsigned workers = 0;  // 0: hardware concurrency
  bool record_trace = false;
};

inline void validate(const SimParams& p) {
  if (p.n_slots == 0) throw std::invalid_argument("sim.slots must be >= 1");
  if (p.n_realizations == 0) throw std::invalid_argument("sim.realizations must be >= 1");
  if (p.arrival_rate < 0.0) throw std::invalid_argument("sim.arrival_rate must be >= 0");
  if (p.buffer_limit == 0) throw std::invalid_argument("sim.buffer_limit must be >= 1");
  if (p.retry_limit < 0) throw std::invalid_argument("sim.retry_limit must be >= 0");
}

struct SlotMetrics {
  std::size_t slot = 0;
  std::vector<std::size_t> csma;      // transmitters that sensed an idle medium
  std::vector<std::size_t> collided;  // same-backoff transmitters that heard each other
  std::vector<double> sinr;           // per csma member
  std::vector<char> success;          // per csma member
  double delivered_bits = 0.0;
  double duration_s = 0.0;
};

struct RunMetrics {
  std::uint64_t seed = 0;
  std::size_t slots = 0;
  double sim_time_s = 0.0;
  double aggregate_bits = 0.0;
  std::vector<double> per_sta_bits;
  std::vector<double> offered_bits;
  std::size_t successes = 0;
  std::size_t failures = 0;
  std::size_t drops = 0;
  std::vector<SlotMetrics> trace;

  double aggregate_mbps() const { return sim_time_s > 0.0 ? aggregate_bits / sim_time_s / 1e6 : 0.0; }
  std::vector<double> per_sta_mbps() const {
    std::vector<double> out(per_sta_bits.size(), 0.0);
    if (sim_time_s > 0.0)
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = per_sta_bits[i] / sim_time_s / 1e6;
    return out;
  }
};

namespace detail {

struct StaState {
  std::size_t queue = 0;
  int backoff = 0;
  int cw = 32;
  int retries = 0;
};

inline std::size_t draw_arrivals(double mean, std::mt19937_64& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<long long> d(mean);
  return static_cast<std::size_t>(d(rng));
}

}  // namespace detail

/// Simulates the association on a fixed network for sim.n_slots rounds.
inline RunMetrics simulate(const Network& net, const Assignment& assoc, const Scenario& s, const SimParams& sim,
                           std::uint64_t seed) {
  const std::size_t n = net.num_stas();
  if (assoc.size() != n) throw std::invalid_argument("simulate: assignment size mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (assoc[i] >= 0 && !net.is_candidate(i, static_cast<std::size_t>(assoc[i])))
      throw std::invalid_argument("simulate: STA associated with an out-of-range AP");

  std::mt19937_64 rng(seed);
  const MacParams& mac = s.mac;
  const double tau = exchange_delay(mac);
  const double gamma = db_to_linear(sim.decode_threshold_db);
  const double payload = mac.payload_bits;
  // A failed frame still occupies the air; it is charged at the slowest
  // decodable rate (never below the SINR-1 rate).
  const double fail_time = frame_time(mac.frame_bits(), channel_rate(std::max(gamma, 1.0), s.radio.bandwidth_hz));

  RunMetrics out;
  out.seed = seed;
  out.per_sta_bits.assign(n, 0.0);
  out.offered_bits.assign(n, 0.0);

  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < n; ++i)
    if (assoc[i] >= 0) members.push_back(i);

  std::vector<detail::StaState> st(n);
  const auto redraw = [&](detail::StaState& x) {
    x.backoff = std::uniform_int_distribution<int>(0, x.cw - 1)(rng);
  };
  const auto arrive = [&](std::size_t i, double duration) {
    auto& x = st[i];
    const double mean = sim.arrival_rate * duration / mac.slot_time_s;
    if (x.queue >= sim.buffer_limit) return;
    const std::size_t k = std::min(detail::draw_arrivals(mean, rng), sim.buffer_limit - x.queue);
    x.queue += k;
    out.offered_bits[i] += static_cast<double>(k) * payload;
  };
  for (std::size_t i : members) {
    st[i].cw = mac.cw_min;
    redraw(st[i]);
    arrive(i, tau);  // warm-up: one exchange worth of arrivals
  }

  // A STA defers to transmitters it senses and, with BSS contention, to any
  // exchange already under way at its own AP.
  const auto blocks = [&](std::size_t i, const Transmission& t) {
    return net.senses(i, t.sta) || (s.bss_contention && static_cast<std::size_t>(assoc[i]) == t.ap);
  };

  std::vector<std::size_t> active;
  std::vector<Transmission> air;
  std::vector<char> collided;
  for (std::size_t slot = 0; slot < sim.n_slots; ++slot) {
    active.clear();
    for (std::size_t i : members)
      if (st[i].queue > 0) active.push_back(i);
    std::stable_sort(active.begin(), active.end(),
                     [&](std::size_t a, std::size_t b) { return st[a].backoff < st[b].backoff; });

    air.clear();
    collided.clear();
    std::vector<std::size_t> deferred;
    std::vector<int> defer_by;
    for (std::size_t g = 0; g < active.size();) {
      std::size_t e = g;
      while (e < active.size() && st[active[e]].backoff == st[active[g]].backoff) ++e;
      const std::size_t before = air.size();
      for (std::size_t k = g; k < e; ++k) {
        const std::size_t i = active[k];
        int heard = -1;
        for (std::size_t t = 0; t < before; ++t)
          if (blocks(i, air[t])) {
            heard = st[air[t].sta].backoff;
            break;  // earlier groups are in backoff order; the first heard is the earliest
          }
        if (heard >= 0) {
          deferred.push_back(i);
          defer_by.push_back(heard);
        } else {
          air.push_back({i, static_cast<std::size_t>(assoc[i])});
          collided.push_back(0);
        }
      }
      for (std::size_t a = before; a < air.size(); ++a)
        for (std::size_t b = a + 1; b < air.size(); ++b)
          if (blocks(air[a].sta, air[b])) collided[a] = collided[b] = 1;
      g = e;
    }

    SlotMetrics rec;
    rec.slot = slot;
    double longest = 0.0;
    double delivered = 0.0;
    for (std::size_t a = 0; a < air.size(); ++a) {
      const std::size_t i = air[a].sta;
      auto& x = st[i];
      bool ok = false;
      double t = fail_time;
      if (!collided[a]) {
        const double q = net.sinr(i, air[a].ap, air);
        ok = q >= gamma;
        if (ok) t = frame_time(mac.frame_bits(), channel_rate(q, s.radio.bandwidth_hz));
        if (sim.record_trace) {
          rec.csma.push_back(i);
          rec.sinr.push_back(q);
          rec.success.push_back(ok);
        }
      } else if (sim.record_trace) {
        rec.collided.push_back(i);
      }
      longest = std::max(longest, t);
      if (ok) {
        out.per_sta_bits[i] += payload;
        delivered += payload;
        --x.queue;
        x.cw = mac.cw_min;
        x.retries = 0;
        ++out.successes;
      } else {
        ++out.failures;
        if (++x.retries > sim.retry_limit) {
          --x.queue;
          x.cw = mac.cw_min;
          x.retries = 0;
          ++out.drops;
        } else {
          x.cw = std::min(2 * x.cw, mac.cw_max);
        }
      }
      redraw(x);
    }
    for (std::size_t k = 0; k < deferred.size(); ++k) st[deferred[k]].backoff -= defer_by[k];

    const double duration = air.empty() ? mac.slot_time_s : tau + longest;
    out.sim_time_s += duration;
    out.aggregate_bits += delivered;
    for (std::size_t i : members) arrive(i, duration);
    if (sim.record_trace) {
      rec.delivered_bits = delivered;
      rec.duration_s = duration;
      out.trace.push_back(std::move(rec));
    }
  }
  out.slots = sim.n_slots;
  return out;
}

/// Placement, channels, weights, association and MAC each draw from their
/// own stream derived from the realization seed.
inline Network realize_network(const Scenario& s, std::uint64_t seed) {
  return Network(make_geometry(s, derive_seed(seed, Stream::geometry)), s, derive_seed(seed, Stream::channel));
}

inline RunMetrics run_realization(const Scenario& s, Scheme scheme, const SimParams& sim, std::uint64_t seed) {
  const Network net = realize_network(s, seed);
  const WeightSnapshot snap = snapshot_weights(net, s);
  const Assignment a = associate(scheme, net, snap, s, seed);
  return simulate(net, a, s, sim, derive_seed(seed, Stream::mac));
}

/// Throughput of covered STAs (at least one AP in range). STAs a scheme
/// leaves unassociated count as zero.
inline std::vector<double> covered_mbps(const Network& net, const RunMetrics& r) {
  std::vector<double> out;
  const auto mbps = r.per_sta_mbps();
  for (std::size_t i = 0; i < net.num_stas(); ++i)
    if (net.covered(i)) out.push_back(mbps[i]);
  return out;
}

inline EmpiricalCdf per_user_cdf(std::span<const double> throughputs) {
  return empirical_cdf(std::vector<double>(throughputs.begin(), throughputs.end()));
}

struct SchemeSamples {
  Scheme scheme = Scheme::ssf;
  std::vector<double> agg_mbps;    // per realization
  std::vector<double> util_sum;    // per realization
  std::vector<double> p10, p50, p90;  // per realization, over covered STAs
  std::vector<double> per_user_mbps;  // pooled over realizations
  std::size_t unassociated_covered = 0;

  Summary aggregate() const { return summarize(agg_mbps); }
};

struct MonteCarloResult {
  std::vector<SchemeSamples> schemes;
  std::vector<std::size_t> n_sta;   // per realization
  std::vector<std::size_t> n_ap;
  std::size_t uncovered = 0;       // STAs with no AP in range, summed over realizations
  std::size_t ap_adjusted = 0;     // realizations with a forced AP

  const SchemeSamples& get(Scheme s) const {
    for (const auto& x : schemes)
      if (x.scheme == s) return x;
    throw std::out_of_range("scheme not part of this run");
  }
  double mean_n_sta() const {
    return n_sta.empty() ? 0.0 : std::accumulate(n_sta.begin(), n_sta.end(), 0.0) / static_cast<double>(n_sta.size());
  }
  double mean_n_ap() const {
    return n_ap.empty() ? 0.0 : std::accumulate(n_ap.begin(), n_ap.end(), 0.0) / static_cast<double>(n_ap.size());
  }
};

namespace detail {

/// Runs f(k) for k in [0, count) on up to `workers` threads. Results must be
/// written to per-index slots so that the outcome is independent of scheduling.
template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& f) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) f(k);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < count; k += workers) f(k);
    });
  for (auto& t : pool) t.join();
}

struct RealizationOutcome {
  std::size_t n_sta = 0, n_ap = 0, uncovered = 0;
  bool adjusted = false;
  std::vector<double> agg, util, p10, p50, p90;
  std::vector<std::vector<double>> users;
  std::vector<std::size_t> unassociated;
};

}  // namespace detail

/// Realization k uses seed base_seed + k; all schemes of a realization share
/// its network, weights and MAC random stream.
inline MonteCarloResult run_monte_carlo(const Scenario& s, std::span<const Scheme> schemes, const SimParams& sim) {
  validate(s);
  validate(sim);
  std::vector<detail::RealizationOutcome> res(sim.n_realizations);
  detail::parallel_for(sim.n_realizations, sim.workers, [&](std::size_t k) {
    const std::uint64_t seed = sim.base_seed + k;
    const Network net = realize_network(s, seed);
    const WeightSnapshot snap = snapshot_weights(net, s);
    auto& r = res[k];
    r.n_sta = net.num_stas();
    r.n_ap = net.num_aps();
    r.adjusted = net.geometry().ap_count_adjusted;
    for (std::size_t i = 0; i < net.num_stas(); ++i) r.uncovered += !net.covered(i);
    for (Scheme sc : schemes) {
      const Assignment a = associate(sc, net, snap, s, seed);
      const RunMetrics m = simulate(net, a, s, sim, derive_seed(seed, Stream::mac));
      r.agg.push_back(m.aggregate_mbps());
      r.util.push_back(objective(snap, a));
      auto users = covered_mbps(net, m);
      std::size_t lost = 0;
      for (std::size_t i = 0; i < net.num_stas(); ++i) lost += net.covered(i) && a[i] < 0;
      r.unassociated.push_back(lost);
      if (users.empty()) {
        r.p10.push_back(0.0);
        r.p50.push_back(0.0);
        r.p90.push_back(0.0);
      } else {
        r.p10.push_back(percentile(users, 10.0));
        r.p50.push_back(percentile(users, 50.0));
        r.p90.push_back(percentile(users, 90.0));
      }
      r.users.push_back(std::move(users));
    }
  });

  MonteCarloResult out;
  for (Scheme sc : schemes) out.schemes.push_back(SchemeSamples{sc, {}, {}, {}, {}, {}, {}, 0});
  for (const auto& r : res) {
    out.n_sta.push_back(r.n_sta);
    out.n_ap.push_back(r.n_ap);
    out.uncovered += r.uncovered;
    out.ap_adjusted += r.adjusted;
    for (std::size_t q = 0; q < schemes.size(); ++q) {
      auto& x = out.schemes[q];
      x.agg_mbps.push_back(r.agg[q]);
      x.util_sum.push_back(r.util[q]);
      x.p10.push_back(r.p10[q]);
      x.p50.push_back(r.p50[q]);
      x.p90.push_back(r.p90[q]);
      x.per_user_mbps.insert(x.per_user_mbps.end(), r.users[q].begin(), r.users[q].end());
      x.unassociated_covered += r.unassociated[q];
    }
  }
  return out;
}

}  // namespace wlanassoc
