#pragma once

// Growing network with mobile STAs. Every epoch the weights are rebuilt from
// the current positions; the optimal scheme is maintained incrementally and
// checked against a from-scratch solve, the sequential baselines keep their
// incumbents, and every scheme is simulated for one epoch.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "wlanassoc/association.hpp"
#include "wlanassoc/simcore.hpp"

namespace wlanassoc {

struct DynamicParams {
  std::size_t initial_stas = 20;
  std::size_t final_stas = 100;
  std::size_t n_aps = 20;
  std::size_t epochs = 40;
  std::size_t epoch_slots = 100;
  double mobile_fraction = 0.3;  // share of new entrants that move
  double speed_min = 0.5;        // m/s
  double speed_max = 2.0;
  std::size_t realizations = 20;
};

inline void validate(const DynamicParams& p) {
  if (p.final_stas < p.initial_stas) throw std::invalid_argument("dynamic.final_stas must be >= initial_stas");
  if (p.n_aps == 0) throw std::invalid_argument("dynamic.n_aps must be >= 1");
  if (p.epochs == 0) throw std::invalid_argument("dynamic.epochs must be >= 1");
  if (p.epoch_slots == 0) throw std::invalid_argument("dynamic.epoch_slots must be >= 1");
  if (p.mobile_fraction < 0.0 || p.mobile_fraction > 1.0)
    throw std::invalid_argument("dynamic.mobile_fraction must be in [0, 1]");
  if (p.speed_min < 0.0 || p.speed_max < p.speed_min)
    throw std::invalid_argument("dynamic.speed_min/speed_max must satisfy 0 <= min <= max");
  if (p.realizations == 0) throw std::invalid_argument("dynamic.realizations must be >= 1");
}

/// Random waypoint, zero pause: walk toward the waypoint at the leg's speed;
/// on arrival draw a new waypoint and speed.
struct Walker {
  std::size_t sta = 0;
  Position waypoint;
  double speed = 1.0;
};

class Mobility {
 public:
  Mobility(const Area& area, double speed_min, double speed_max, std::uint64_t seed)
      : area_(area), vmin_(speed_min), vmax_(speed_max), rng_(seed) {}

  void add(std::size_t sta) {
    Walker w;
    w.sta = sta;
    w.waypoint = detail::uniform_position(area_, rng_);
    w.speed = draw_speed();
    walkers_.push_back(w);
  }

  void advance(std::vector<Position>& positions, double seconds) {
    for (auto& w : walkers_) {
      double left = seconds;
      Position& p = positions.at(w.sta);
      while (left > 0.0) {
        const double d = distance(p, w.waypoint);
        if (w.speed <= 0.0) break;
        const double reach = w.speed * left;
        if (reach < d) {
          p.x += (w.waypoint.x - p.x) * reach / d;
          p.y += (w.waypoint.y - p.y) * reach / d;
          break;
        }
        p = w.waypoint;
        left -= d / w.speed;
        w.waypoint = detail::uniform_position(area_, rng_);
        w.speed = draw_speed();
      }
    }
  }

  const std::vector<Walker>& walkers() const { return walkers_; }

 private:
  double draw_speed() { return std::uniform_real_distribution<double>(vmin_, vmax_)(rng_); }

  Area area_;
  double vmin_;
  double vmax_;
  std::mt19937_64 rng_;
  std::vector<Walker> walkers_;
};

/// Number of STAs present at each epoch: starts at initial_stas, reaches
/// final_stas at the last epoch, arrivals spread at random in between.
inline std::vector<std::size_t> arrival_schedule(const DynamicParams& p, std::uint64_t seed) {
  std::vector<std::size_t> count(p.epochs, p.initial_stas);
  const std::size_t extra = p.final_stas - p.initial_stas;
  if (extra == 0) return count;
  if (p.epochs == 1) {
    count[0] = p.final_stas;
    return count;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> when(1, p.epochs - 1);
  std::vector<std::size_t> per_epoch(p.epochs, 0);
  for (std::size_t k = 0; k < extra; ++k) ++per_epoch[when(rng)];
  std::size_t n = p.initial_stas;
  for (std::size_t e = 0; e < p.epochs; ++e) {
    n += per_epoch[e];
    count[e] = n;
  }
  return count;
}

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t n_sta = 0;
  // Per scheme, order of DynamicResult::schemes.
  std::vector<double> agg_mbps;
  std::vector<double> util_sum;
  std::vector<double> p10, p50, p90;  // over covered STAs
  double gda_objective = 0.0;
  double gaa_objective = 0.0;
  bool objectives_equal = false;
  std::size_t admitted = 0;
  std::size_t changed = 0;
};

struct DynamicResult {
  std::vector<Scheme> schemes;
  std::vector<std::vector<EpochRecord>> runs;  // per realization, per epoch

  bool all_objectives_equal() const {
    for (const auto& run : runs)
      for (const auto& e : run)
        if (!e.objectives_equal) return false;
    return true;
  }
  std::size_t index_of(Scheme s) const {
    const auto it = std::find(schemes.begin(), schemes.end(), s);
    if (it == schemes.end()) throw std::out_of_range("scheme not part of this run");
    return static_cast<std::size_t>(it - schemes.begin());
  }
  /// Per-realization aggregate throughput of one scheme at one epoch.
  std::vector<double> samples(Scheme s, std::size_t epoch) const {
    return column(s, epoch, &EpochRecord::agg_mbps);
  }
  std::vector<double> column(Scheme s, std::size_t epoch, std::vector<double> EpochRecord::*field) const {
    const std::size_t q = index_of(s);
    std::vector<double> out;
    for (const auto& run : runs) out.push_back((run.at(epoch).*field)[q]);
    return out;
  }
};

inline std::vector<EpochRecord> run_dynamic_realization(const Scenario& s, const DynamicParams& dp,
                                                        std::span<const Scheme> schemes, const SimParams& sim,
                                                        std::uint64_t seed) {
  const auto schedule = arrival_schedule(dp, derive_seed(seed, Stream::dynamic));
  std::mt19937_64 place(derive_seed(seed, Stream::geometry));
  NetworkGeometry g = generate_uniform(0, dp.n_aps, s.area, derive_seed(seed, {static_cast<std::uint64_t>(Stream::geometry), 1}));
  Mobility mobility(s.area, dp.speed_min, dp.speed_max, derive_seed(seed, Stream::mobility));
  std::bernoulli_distribution moves(dp.mobile_fraction);
  const std::uint64_t channel_seed = derive_seed(seed, Stream::channel);
  // Walking time per epoch: nominal round length times rounds per epoch.
  const double epoch_seconds = static_cast<double>(dp.epoch_slots) * exchange_delay(s.mac);

  DynamicAssociator gda(dp.n_aps);
  std::vector<Assignment> held(schemes.size());
  std::vector<EpochRecord> out;
  SimParams epoch_sim = sim;
  epoch_sim.n_slots = dp.epoch_slots;
  epoch_sim.record_trace = false;

  for (std::size_t e = 0; e < dp.epochs; ++e) {
    if (e > 0) mobility.advance(g.sta_positions, epoch_seconds);
    while (g.sta_positions.size() < schedule[e]) {
      const std::size_t id = g.sta_positions.size();
      g.sta_positions.push_back(detail::uniform_position(s.area, place));
      if (e > 0 && moves(place)) mobility.add(id);
    }
    const Network net(g, s, channel_seed);
    const WeightSnapshot snap = snapshot_weights(net, s);
    const std::size_t n = net.num_stas();

    EpochRecord rec;
    rec.epoch = e;
    rec.n_sta = n;
    const auto st = gda.update(snap);
    rec.admitted = st.admitted;
    rec.changed = st.changed;
    const Assignment optimal = gda.assignment();
    rec.gda_objective = objective(snap, optimal);
    rec.gaa_objective = objective(snap, gaa(snap, CapacityMode::uncapped));
    rec.objectives_equal = rec.gda_objective == rec.gaa_objective;

    const auto order = arrival_order(n, s.association.shuffle_arrivals, seed);
    const std::uint64_t mac_seed = derive_seed(seed, {static_cast<std::uint64_t>(Stream::mac), e});
    for (std::size_t q = 0; q < schemes.size(); ++q) {
      Assignment a;
      Assignment keep = held[q];
      keep.resize(n, -1);
      for (std::size_t i = 0; i < n; ++i)
        if (keep[i] >= 0 && !net.is_candidate(i, static_cast<std::size_t>(keep[i]))) keep[i] = -1;
      switch (schemes[q]) {
        case Scheme::gaa: a = optimal; break;
        case Scheme::ssf: a = ssf(net); break;
        case Scheme::greedy: a = greedy(net, snap, order, keep); break;
        case Scheme::smartassoc: a = smartassoc(net, snap, order, keep); break;
        case Scheme::bpf: a = bpf(net, snap, order, keep); break;
      }
      held[q] = a;
      const RunMetrics m = simulate(net, a, s, epoch_sim, mac_seed);
      rec.agg_mbps.push_back(m.aggregate_mbps());
      rec.util_sum.push_back(objective(snap, a));
      const auto users = covered_mbps(net, m);
      rec.p10.push_back(users.empty() ? 0.0 : percentile(users, 10.0));
      rec.p50.push_back(users.empty() ? 0.0 : percentile(users, 50.0));
      rec.p90.push_back(users.empty() ? 0.0 : percentile(users, 90.0));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline DynamicResult run_dynamic(const Scenario& s, const DynamicParams& dp, std::span<const Scheme> schemes,
                                 const SimParams& sim) {
  validate(s);
  validate(dp);
  validate(sim);
  DynamicResult out;
  out.schemes.assign(schemes.begin(), schemes.end());
  out.runs.resize(dp.realizations);
  detail::parallel_for(dp.realizations, sim.workers, [&](std::size_t k) {
    out.runs[k] = run_dynamic_realization(s, dp, schemes, sim, sim.base_seed + k);
  });
  return out;
}

}  // namespace wlanassoc
