#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlanassoc/mac.hpp"
#include "wlanassoc/matching.hpp"
#include "wlanassoc/network.hpp"
#include "wlanassoc/scenario.hpp"

namespace wlanassoc {

/// Chosen AP per STA; -1 when the STA is not associated.
using Assignment = std::vector<int>;

enum class Scheme { ssf, gaa, smartassoc, greedy, bpf };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::ssf: return "ssf";
    case Scheme::gaa: return "gaa";
    case Scheme::smartassoc: return "smartassoc";
    case Scheme::greedy: return "greedy";
    case Scheme::bpf: return "bpf";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& name) {
  for (auto s : {Scheme::ssf, Scheme::gaa, Scheme::smartassoc, Scheme::greedy, Scheme::bpf})
    if (name == to_string(s)) return s;
  if (name == "gda") return Scheme::gaa;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

/// Rate chain of one STA-AP edge at a given SINR.
struct EdgeQuality {
  double sinr = 0.0;
  double rate_bps = 0.0;
  double frame_time_s = std::numeric_limits<double>::infinity();
  double beta = 0.0;     // effective throughput
  double utility = kUnservable;
};

inline EdgeQuality edge_quality(double sinr, const Scenario& s) {
  EdgeQuality e;
  e.sinr = sinr;
  e.rate_bps = channel_rate(sinr, s.radio.bandwidth_hz);
  e.frame_time_s = frame_time(s.mac.frame_bits(), e.rate_bps);
  e.beta = effective_throughput(e.frame_time_s, exchange_delay(s.mac), s.mac.mcs_order);
  e.utility = e.beta > 0.0 ? utility(e.beta, s.fairness) : kUnservable;
  return e;
}

/// Edge weights for one network state plus the link quantities behind them.
struct WeightSnapshot {
  std::size_t num_stas = 0;
  std::size_t num_aps = 0;
  WeightMatrix weights;             // num_stas x num_aps
  std::vector<EdgeQuality> edges;   // row-major; default-valued for non-candidates
  std::vector<char> servable;       // STA has at least one servable edge

  const EdgeQuality& edge(std::size_t i, std::size_t j) const { return edges.at(i * num_aps + j); }
  std::size_t servable_count() const {
    return static_cast<std::size_t>(std::count(servable.begin(), servable.end(), 1));
  }
};

/// Builds weights from the expected interference under a reference
/// association: every associated STA z outside the carrier-sensing range of
/// STA i (and, with BSS contention, not served by AP j) interferes at AP j
/// with probability 1/(1 + number of associated STAs contending with z),
/// leaking through its own beamformer.
inline WeightSnapshot build_weights(const Network& net, const Scenario& s, const Assignment& reference) {
  const std::size_t n = net.num_stas();
  const std::size_t m = net.num_aps();
  if (reference.size() != n) throw std::invalid_argument("build_weights: reference association size mismatch");
  WeightSnapshot snap;
  snap.num_stas = n;
  snap.num_aps = m;
  snap.weights = WeightMatrix(n, m, kUnservable);
  snap.edges.assign(n * m, EdgeQuality{});
  snap.servable.assign(n, 0);

  std::vector<double> access(n, 0.0);
  for (std::size_t z = 0; z < n; ++z) {
    if (reference[z] < 0) continue;
    std::size_t rivals = 0;
    for (std::size_t y = 0; y < n; ++y)
      if (y != z && reference[y] >= 0 && (net.senses(y, z) || (s.bss_contention && reference[y] == reference[z])))
        ++rivals;
    access[z] = 1.0 / (1.0 + static_cast<double>(rivals));
  }

  const double gamma = s.sinr_threshold();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : net.candidates(i)) {
      double interference = 0.0;
      for (std::size_t z = 0; z < n; ++z) {
        if (z == i || reference[z] < 0 || net.senses(i, z)) continue;
        if (s.bss_contention && static_cast<std::size_t>(reference[z]) == j) continue;
        interference += access[z] * net.cross(z, static_cast<std::size_t>(reference[z]), j);
      }
      const double sinr = net.desired(i, j) / (net.noise(i, j) + interference);
      const EdgeQuality e = edge_quality(sinr, s);
      snap.edges[i * m + j] = e;
      if (s.association.sinr_filter && sinr < gamma) continue;
      if (is_unservable(e.utility)) continue;
      snap.weights(i, j) = e.utility;
      snap.servable[i] = 1;
    }
  }
  return snap;
}

/// Sum of chosen utilities in STA order. Unassociated STAs contribute
/// nothing; an associated STA on an unservable edge contributes kUnservable.
inline double objective(const WeightSnapshot& snap, const Assignment& a) {
  if (a.size() != snap.num_stas) throw std::invalid_argument("objective: assignment size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] >= 0) sum += snap.weights(i, static_cast<std::size_t>(a[i]));
  return sum;
}

/// Every associated STA sits on a candidate AP.
inline bool respects_candidates(const Network& net, const Assignment& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] >= 0 && !net.is_candidate(i, static_cast<std::size_t>(a[i]))) return false;
  return true;
}

inline std::vector<std::size_t> arrival_order(std::size_t n, bool shuffle, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle) {
    std::mt19937_64 rng(derive_seed(seed, Stream::arrival_order));
    std::shuffle(order.begin(), order.end(), rng);
  }
  return order;
}

namespace detail {

inline std::vector<std::size_t> candidates_by_index(const Network& net, std::size_t i) {
  auto c = net.candidates(i);
  std::sort(c.begin(), c.end());
  return c;
}

inline double inverse_rate(const WeightSnapshot& snap, std::size_t i, std::size_t j) {
  const double r = snap.edge(i, j).rate_bps;
  return r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
}

inline void check_sizes(const Network& net, const WeightSnapshot& snap, std::span<const std::size_t> order) {
  if (snap.num_stas != net.num_stas() || snap.num_aps != net.num_aps())
    throw std::invalid_argument("snapshot does not match network");
  if (order.size() > net.num_stas()) throw std::invalid_argument("arrival order longer than STA count");
}

}  // namespace detail

/// Strongest signal first. Equal RSS goes to the lower AP index.
inline Assignment ssf(const Network& net) {
  Assignment a(net.num_stas(), -1);
  for (std::size_t i = 0; i < net.num_stas(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j : detail::candidates_by_index(net, i))
      if (net.rss(i, j) > best) {
        best = net.rss(i, j);
        a[i] = static_cast<int>(j);
      }
  }
  return a;
}

/// Minimum-load AP on arrival; load is the sum of inverse channel rates of
/// the STAs already served. `start` carries incumbents (dynamic runs).
inline Assignment greedy(const Network& net, const WeightSnapshot& snap, std::span<const std::size_t> order,
                         Assignment start = {}) {
  detail::check_sizes(net, snap, order);
  if (start.empty()) start.assign(net.num_stas(), -1);
  std::vector<double> load(net.num_aps(), 0.0);
  for (std::size_t i = 0; i < start.size(); ++i)
    if (start[i] >= 0) load[static_cast<std::size_t>(start[i])] += detail::inverse_rate(snap, i, static_cast<std::size_t>(start[i]));
  for (std::size_t i : order) {
    if (start[i] >= 0) continue;
    int pick = -1;
    for (std::size_t j : detail::candidates_by_index(net, i))
      if (pick < 0 || load[j] < load[static_cast<std::size_t>(pick)]) pick = static_cast<int>(j);
    if (pick < 0) continue;
    start[i] = pick;
    load[static_cast<std::size_t>(pick)] += detail::inverse_rate(snap, i, static_cast<std::size_t>(pick));
  }
  return start;
}

/// Picks the candidate AP that minimizes the L2 norm of the load vector over
/// the STA's candidate APs after it joins.
inline Assignment smartassoc(const Network& net, const WeightSnapshot& snap, std::span<const std::size_t> order,
                             Assignment start = {}) {
  detail::check_sizes(net, snap, order);
  if (start.empty()) start.assign(net.num_stas(), -1);
  std::vector<double> load(net.num_aps(), 0.0);
  for (std::size_t i = 0; i < start.size(); ++i)
    if (start[i] >= 0) load[static_cast<std::size_t>(start[i])] += detail::inverse_rate(snap, i, static_cast<std::size_t>(start[i]));
  for (std::size_t i : order) {
    if (start[i] >= 0) continue;
    const auto cand = detail::candidates_by_index(net, i);
    int pick = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j : cand) {
      double sq = 0.0;
      for (std::size_t k : cand) {
        const double l = load[k] + (k == j ? detail::inverse_rate(snap, i, j) : 0.0);
        sq += l * l;
      }
      const double norm = std::sqrt(sq);
      if (pick < 0 || norm < best) {
        best = norm;
        pick = static_cast<int>(j);
      }
    }
    if (pick < 0) continue;
    start[i] = pick;
    load[static_cast<std::size_t>(pick)] += detail::inverse_rate(snap, i, static_cast<std::size_t>(pick));
  }
  return start;
}

/// Change in sum of log throughput when a STA with effective throughput beta
/// joins an AP already time-sharing among n STAs.
inline double bpf_gain(double beta, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double share = n == 0 ? 0.0 : nn * std::log((nn + 1.0) / nn);
  return std::log(beta) - std::log(nn + 1.0) - share;
}

/// Best performance first: each arriving STA joins the AP with the largest
/// marginal gain in the equal-weight sum of log effective throughput.
inline Assignment bpf(const Network& net, const WeightSnapshot& snap, std::span<const std::size_t> order,
                      Assignment start = {}) {
  detail::check_sizes(net, snap, order);
  if (start.empty()) start.assign(net.num_stas(), -1);
  std::vector<std::size_t> count(net.num_aps(), 0);
  for (int a : start)
    if (a >= 0) ++count[static_cast<std::size_t>(a)];
  for (std::size_t i : order) {
    if (start[i] >= 0) continue;
    int pick = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j : detail::candidates_by_index(net, i)) {
      const double g = bpf_gain(snap.edge(i, j).beta, count[j]);
      if (pick < 0 || g > best) {
        best = g;
        pick = static_cast<int>(j);
      }
    }
    if (pick < 0) continue;
    start[i] = pick;
    ++count[static_cast<std::size_t>(pick)];
  }
  return start;
}

struct GaaSolution {
  Assignment assignment;
  WeightMatrix working;  // replicated (and, if capped, padded) matrix
  Matching matching;
  std::vector<std::size_t> row_sta;  // STA behind each real working row
};

/// Optimal association over the snapshot weights. STAs without a servable
/// edge are left unassociated. Uncapped mode gives every AP one slot per STA
/// that can use it; balanced mode gives every AP ceil(N/M) slots.
inline GaaSolution solve_gaa(const WeightSnapshot& snap, CapacityMode mode) {
  GaaSolution out;
  out.assignment.assign(snap.num_stas, -1);
  for (std::size_t i = 0; i < snap.num_stas; ++i)
    if (snap.servable[i]) out.row_sta.push_back(i);
  const std::size_t rows = out.row_sta.size();
  const std::size_t m = snap.num_aps;
  if (rows == 0 || m == 0) return out;

  WeightMatrix base(rows, m);
  for (std::size_t r = 0; r < rows; ++r) {
    base.set_row_label(r, static_cast<int>(out.row_sta[r]));
    for (std::size_t j = 0; j < m; ++j) base(r, j) = snap.weights(out.row_sta[r], j);
  }
  if (mode == CapacityMode::uncapped) {
    std::vector<std::size_t> cap(m, 0);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < m; ++j)
        if (!is_unservable(base(r, j))) ++cap[j];
    out.working = replicate_columns(base, cap);
  } else {
    out.working = pad_and_replicate(base, (rows + m - 1) / m);
  }
  out.matching = solve(out.working);
  for (std::size_t r = 0; r < rows; ++r) {
    const int col = out.matching.row_to_col[r];
    if (col < 0) continue;
    const auto c = static_cast<std::size_t>(col);
    if (is_unservable(out.working(r, c))) continue;
    out.assignment[out.row_sta[r]] = out.working.col_labels()[c];
  }
  return out;
}

inline Assignment gaa(const WeightSnapshot& snap, CapacityMode mode = CapacityMode::uncapped) {
  return solve_gaa(snap, mode).assignment;
}

/// Weights used for a network state: the reference association starts as
/// strongest-signal-first and, for more than one iteration, is replaced by
/// the previous round's optimal association.
inline WeightSnapshot snapshot_weights(const Network& net, const Scenario& s) {
  Assignment ref = ssf(net);
  WeightSnapshot snap = build_weights(net, s, ref);
  for (int it = 1; it < s.association.weight_iterations; ++it) {
    ref = gaa(snap, s.association.capacity);
    snap = build_weights(net, s, ref);
  }
  return snap;
}

/// Per-STA view of an association on a snapshot.
struct AssociationSet {
  Assignment ap;
  std::vector<double> utility;      // chosen edge weight, 0 if unassociated
  std::vector<double> sinr;
  std::vector<double> rate_bps;
  std::vector<double> upper_bound;  // best servable utility over all APs
  double objective = 0.0;
};

inline AssociationSet describe(const WeightSnapshot& snap, const Assignment& a) {
  AssociationSet out;
  out.ap = a;
  const std::size_t n = snap.num_stas;
  out.utility.assign(n, 0.0);
  out.sinr.assign(n, 0.0);
  out.rate_bps.assign(n, 0.0);
  out.upper_bound.assign(n, kUnservable);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < snap.num_aps; ++j) out.upper_bound[i] = std::max(out.upper_bound[i], snap.weights(i, j));
    if (a[i] < 0) continue;
    const auto j = static_cast<std::size_t>(a[i]);
    out.utility[i] = snap.weights(i, j);
    out.sinr[i] = snap.edge(i, j).sinr;
    out.rate_bps[i] = snap.edge(i, j).rate_bps;
  }
  out.objective = objective(snap, a);
  return out;
}

/// Association for any scheme on one network state.
inline Assignment associate(Scheme scheme, const Network& net, const WeightSnapshot& snap, const Scenario& s,
                            std::uint64_t seed) {
  const auto order = arrival_order(net.num_stas(), s.association.shuffle_arrivals, seed);
  switch (scheme) {
    case Scheme::ssf: return ssf(net);
    case Scheme::gaa: return gaa(snap, s.association.capacity);
    case Scheme::greedy: return greedy(net, snap, order);
    case Scheme::smartassoc: return smartassoc(net, snap, order);
    case Scheme::bpf: return bpf(net, snap, order);
  }
  throw std::logic_error("associate: unknown scheme");
}

/// Incremental association across a growing, changing network. Keeps the
/// replicated working matrix and its optimal matching between updates; new
/// STAs are admitted one at a time and changed rows are updated one at a
/// time, each with a single augmenting stage. Every AP holds one replica per
/// known STA, so the result matches uncapped solve_gaa.
class DynamicAssociator {
 public:
  struct UpdateStats {
    std::size_t admitted = 0;
    std::size_t changed = 0;
  };

  explicit DynamicAssociator(std::size_t num_aps) : m_(num_aps) {
    if (num_aps == 0) throw std::invalid_argument("DynamicAssociator: no APs");
  }

  UpdateStats update(const WeightSnapshot& snap) {
    if (snap.num_aps != m_) throw std::invalid_argument("DynamicAssociator: AP count changed");
    if (snap.num_stas < base_.size()) throw std::invalid_argument("DynamicAssociator: STAs cannot leave");
    UpdateStats st;
    for (std::size_t i = base_.size(); i < snap.num_stas; ++i) {
      admit(row_of(snap, i));
      ++st.admitted;
    }
    for (std::size_t i = 0; i < snap.num_stas; ++i) {
      auto row = row_of(snap, i);
      if (row == base_[i]) continue;
      LineChange change{Line::row, i, replicate(row)};
      matching_ = update_weights(std::move(matching_), working_, change);
      base_[i] = std::move(row);
      ++st.changed;
    }
    return st;
  }

  Assignment assignment() const {
    Assignment a(base_.size(), -1);
    for (std::size_t i = 0; i < base_.size(); ++i) {
      const int col = matching_.row_to_col[i];
      if (col < 0) continue;
      const auto c = static_cast<std::size_t>(col);
      if (is_unservable(working_(i, c))) continue;
      a[i] = working_.col_labels()[c];
    }
    return a;
  }

  const Matching& matching() const { return matching_; }
  const WeightMatrix& working() const { return working_; }

 private:
  std::vector<double> row_of(const WeightSnapshot& snap, std::size_t i) const {
    std::vector<double> r(m_);
    for (std::size_t j = 0; j < m_; ++j) r[j] = snap.weights(i, j);
    return r;
  }

  std::vector<double> replicate(const std::vector<double>& base_row) const {
    std::vector<double> r(working_.cols());
    for (std::size_t c = 0; c < r.size(); ++c) r[c] = base_row[static_cast<std::size_t>(working_.col_labels()[c])];
    return r;
  }

  // One new STA brings one new row and one new replica column per AP.
  void admit(std::vector<double> base_row) {
    const std::size_t rows = working_.rows();
    const std::size_t cols = working_.cols();
    WeightMatrix next(rows + 1, cols + m_);
    for (std::size_t c = 0; c < cols; ++c) next.set_col_label(c, working_.col_labels()[c]);
    for (std::size_t j = 0; j < m_; ++j) next.set_col_label(cols + j, static_cast<int>(j));
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) next(r, c) = working_(r, c);
      for (std::size_t j = 0; j < m_; ++j) next(r, cols + j) = base_[r][j];
    }
    for (std::size_t c = 0; c < cols + m_; ++c)
      next(rows, c) = base_row[static_cast<std::size_t>(next.col_labels()[c])];
    working_ = std::move(next);
    matching_ = extend(std::move(matching_), working_);
    base_.push_back(std::move(base_row));
  }

  std::size_t m_;
  WeightMatrix working_;
  Matching matching_;
  std::vector<std::vector<double>> base_;
};

}  // namespace wlanassoc
