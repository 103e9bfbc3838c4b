#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "wlanassoc/association.hpp"
#include "wlanassoc/network.hpp"

using namespace wlanassoc;

namespace {

Scenario small_scenario() {
  Scenario s;
  s.area = {60.0, 60.0};
  return s;
}

Network random_network(const Scenario& s, std::size_t n, std::size_t m, std::uint64_t seed) {
  return Network(generate_uniform(n, m, s.area, derive_seed(seed, Stream::geometry)), s, derive_seed(seed, Stream::channel));
}

WeightSnapshot random_snapshot(std::size_t n, std::size_t m, std::mt19937_64& rng, double unservable_share = 0.2) {
  WeightSnapshot s;
  s.num_stas = n;
  s.num_aps = m;
  s.weights = WeightMatrix(n, m, kUnservable);
  s.edges.assign(n * m, EdgeQuality{});
  s.servable.assign(n, 0);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  std::bernoulli_distribution drop(unservable_share);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (drop(rng)) continue;
      s.weights(i, j) = u(rng);
      s.servable[i] = 1;
    }
  return s;
}

// Exhaustive best over maps of the given rows to APs with at most cap rows
// per AP, weights read from the snapshot.
double best_capped(const WeightSnapshot& s, const std::vector<std::size_t>& rows, std::size_t cap) {
  std::vector<std::size_t> pick(rows.size(), 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::size_t> used(s.num_aps, 0);
    bool ok = true;
    double v = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      ok &= ++used[pick[k]] <= cap;
      v += s.weights(rows[k], pick[k]);
    }
    if (ok) best = std::max(best, v);
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == s.num_aps) pick[k++] = 0;
    if (k == pick.size()) break;
  }
  return best;
}

}  // namespace

TEST(Schemes, NamesRoundTrip) {
  for (auto s : {Scheme::ssf, Scheme::gaa, Scheme::smartassoc, Scheme::greedy, Scheme::bpf})
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  EXPECT_EQ(parse_scheme("gda"), Scheme::gaa);
  EXPECT_THROW(parse_scheme("best"), std::invalid_argument);
}

TEST(Network, AccessorsRejectNonCandidates) {
  Scenario s = small_scenario();
  NetworkGeometry g;
  g.area = {2000.0, 10.0};
  g.ap_positions = {{0.0, 0.0}, {1900.0, 0.0}};
  g.sta_positions = {{5.0, 0.0}};
  const Network net(g, s, 1);
  EXPECT_TRUE(net.is_candidate(0, 0));
  EXPECT_FALSE(net.is_candidate(0, 1));
  EXPECT_THROW(net.desired(0, 1), std::invalid_argument);
  EXPECT_NO_THROW(net.desired(0, 0));
}

TEST(Network, SinrMatchesIndependentZeroForcing) {
  const Scenario s = small_scenario();
  const Network net = random_network(s, 30, 4, 3);
  const PhyParams p = s.phy();
  int checked = 0;
  for (std::size_t i = 0; i < net.num_stas(); ++i)
    for (std::size_t j : net.candidates(i)) {
      const CMatrix& h = net.channel(i, j).entries;
      const CMatrix w = h.completeOrthogonalDecomposition().pseudoInverse();
      const double e = p.symbol_energy / p.num_tx;
      const double desired = e * (w * h).squaredNorm();
      const double noise = w.squaredNorm() * p.noise_variance;
      EXPECT_NEAR(net.desired(i, j), desired, 1e-9 * desired);
      EXPECT_NEAR(net.noise(i, j), noise, 1e-9 * noise);
      // One interferer: its own beamformer applied to its channel toward AP j.
      const std::size_t z = (i + 1) % net.num_stas();
      if (!net.covered(z)) continue;
      const std::size_t a = net.candidates(z).front();
      const CMatrix wz = net.channel(z, a).entries.completeOrthogonalDecomposition().pseudoInverse();
      const double leak = e * (wz * net.channel(z, j).entries).squaredNorm();
      const Transmission tx[] = {{i, j}, {z, a}};
      EXPECT_NEAR(net.sinr(i, j, tx), desired / (noise + leak), 1e-9 * desired / (noise + leak));
      ++checked;
    }
  EXPECT_GT(checked, 10);
}

TEST(Weights, UtilityChainOracle) {
  const Scenario s = small_scenario();
  const Network net = random_network(s, 30, 6, 4);
  const WeightSnapshot snap = build_weights(net, s, ssf(net));
  int links = 0;
  for (std::size_t i = 0; i < net.num_stas(); ++i)
    for (std::size_t j : net.candidates(i)) {
      const EdgeQuality& e = snap.edge(i, j);
      const double rate = 20e6 * std::log2(1.0 + e.sinr);
      const double t = (1522.0 * 8.0) / rate;
      const double tau = 50e-6 + 10e-6 + 512 * 20e-6 + 64e-6 + (34 * 8 / 6e6 + 20e-6);
      const double beta = 1.0 / (t + tau);
      const double u = std::sqrt(beta) / 0.5;
      EXPECT_NEAR(e.rate_bps, rate, 1e-12 * rate);
      EXPECT_NEAR(e.beta, beta, 1e-12 * beta);
      EXPECT_NEAR(e.utility, u, 1e-12 * u);
      if (e.sinr >= 1.0) {
        EXPECT_EQ(snap.weights(i, j), e.utility);
      } else {
        EXPECT_TRUE(is_unservable(snap.weights(i, j)));
      }
      ++links;
    }
  EXPECT_GT(links, 30);
}

TEST(Weights, NonCandidatesUnservable) {
  const Scenario s = small_scenario();
  const Network net = random_network(s, 20, 5, 5);
  const auto snap = build_weights(net, s, ssf(net));
  for (std::size_t i = 0; i < net.num_stas(); ++i)
    for (std::size_t j = 0; j < net.num_aps(); ++j) {
      if (!net.is_candidate(i, j)) {
        EXPECT_TRUE(is_unservable(snap.weights(i, j)));
      }
    }
}

TEST(Baselines, SsfPicksStrongest) {
  const Scenario s = small_scenario();
  const Network net = random_network(s, 40, 6, 6);
  const auto a = ssf(net);
  for (std::size_t i = 0; i < net.num_stas(); ++i) {
    if (!net.covered(i)) {
      EXPECT_EQ(a[i], -1);
      continue;
    }
    for (std::size_t j : net.candidates(i)) EXPECT_GE(net.rss(i, static_cast<std::size_t>(a[i])), net.rss(i, j));
  }
}

TEST(Baselines, GreedyJoinsLeastLoaded) {
  const Scenario s = small_scenario();
  const Network net = random_network(s, 25, 5, 7);
  const auto snap = build_weights(net, s, ssf(net));
  const auto order = arrival_order(net.num_stas(), true, 3);
  const auto a = greedy(net, snap, order);
  std::vector<double> load(net.num_aps(), 0.0);
  for (std::size_t i : order) {
    if (!net.covered(i)) continue;
    const auto j = static_cast<std::size_t>(a[i]);
    for (std::size_t k : net.candidates(i)) {
      EXPECT_LE(load[j], load[k]);
    }
    load[j] += 1.0 / snap.edge(i, j).rate_bps;
  }
}

TEST(Baselines, BpfGainByHand) {
  const double b = 50.0;
  EXPECT_NEAR(bpf_gain(b, 0), std::log(b), 1e-12);
  // Joining one incumbent: newcomer gets b/2, incumbent loses half its share.
  EXPECT_NEAR(bpf_gain(b, 1), std::log(b / 2.0) + std::log(0.5), 1e-12);
  EXPECT_NEAR(bpf_gain(b, 3), std::log(b / 4.0) + 3.0 * std::log(3.0 / 4.0), 1e-12);
}

TEST(Baselines, RespectCandidatesAndIncumbents) {
  const Scenario s = small_scenario();
  const Network net = random_network(s, 30, 5, 8);
  const auto snap = build_weights(net, s, ssf(net));
  const auto order = arrival_order(net.num_stas(), false, 0);
  Assignment start(net.num_stas(), -1);
  if (net.covered(0)) start[0] = static_cast<int>(net.candidates(0).back());
  for (auto a : {greedy(net, snap, order, start), smartassoc(net, snap, order, start), bpf(net, snap, order, start)}) {
    EXPECT_TRUE(respects_candidates(net, a));
    EXPECT_EQ(a[0], start[0]);
    for (std::size_t i = 0; i < net.num_stas(); ++i) EXPECT_EQ(a[i] >= 0, net.covered(i));
  }
}

TEST(Gaa, UncappedTakesRowMaxima) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto snap = random_snapshot(1 + rng() % 9, 1 + rng() % 5, rng);
    const auto a = gaa(snap, CapacityMode::uncapped);
    for (std::size_t i = 0; i < snap.num_stas; ++i) {
      if (!snap.servable[i]) {
        EXPECT_EQ(a[i], -1);
        continue;
      }
      const auto row = snap.weights.row(i);
      EXPECT_EQ(snap.weights(i, static_cast<std::size_t>(a[i])), *std::max_element(row.begin(), row.end()));
    }
  }
}

TEST(Gaa, BalancedAgainstExhaustive) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = t % 2 ? 5 : 6, m = t % 2 ? 2 : 3;
    const auto snap = random_snapshot(n, m, rng, 0.1);
    const auto sol = solve_gaa(snap, CapacityMode::balanced);
    const std::size_t rows = sol.row_sta.size();
    if (rows == 0) continue;
    double got = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
      got += sol.working(r, static_cast<std::size_t>(sol.matching.row_to_col[r]));
    const std::size_t cap = (rows + m - 1) / m;
    const double want = best_capped(snap, sol.row_sta, cap);
    EXPECT_NEAR(got, want, 1e-9 * std::max(1.0, std::abs(want)));
    std::vector<std::size_t> used(m, 0);
    for (int x : sol.assignment) {
      if (x >= 0) {
        EXPECT_LE(++used[static_cast<std::size_t>(x)], cap);
      }
    }
  }
}

TEST(Gaa, DominatesBaselines) {
  const Scenario s = small_scenario();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Network net = random_network(s, 25, 5, seed);
    const auto snap = snapshot_weights(net, s);
    const double best = objective(snap, gaa(snap));
    const auto order = arrival_order(net.num_stas(), false, seed);
    for (const auto& a : {ssf(net), greedy(net, snap, order), smartassoc(net, snap, order), bpf(net, snap, order)})
      EXPECT_GE(best, objective(snap, a));
  }
}

TEST(Gaa, DescribeReportsUpperBound) {
  std::mt19937_64 rng(23);
  const auto snap = random_snapshot(6, 3, rng);
  const auto d = describe(snap, gaa(snap));
  for (std::size_t i = 0; i < 6; ++i) {
    if (d.ap[i] >= 0) {
      EXPECT_EQ(d.utility[i], d.upper_bound[i]);
    }
  }
}

TEST(Dynamic, IncrementalEqualsFreshSolve) {
  std::mt19937_64 rng(24);
  for (int run = 0; run < 10; ++run) {
    const std::size_t m = 2 + rng() % 4;
    DynamicAssociator gda(m);
    WeightSnapshot cur = random_snapshot(3, m, rng);
    for (int step = 0; step < 15; ++step) {
      const auto st = gda.update(cur);
      (void)st;
      EXPECT_EQ(objective(cur, gda.assignment()), objective(cur, gaa(cur)));
      EXPECT_EQ(certificate_violation(gda.working(), gda.matching()), "");
      // Grow by up to two STAs and redraw a few rows.
      auto next = random_snapshot(cur.num_stas + rng() % 3, m, rng);
      for (std::size_t i = 0; i < cur.num_stas; ++i)
        if (rng() % 3)
          for (std::size_t j = 0; j < m; ++j) next.weights(i, j) = cur.weights(i, j);
      for (std::size_t i = 0; i < next.num_stas; ++i) {
        next.servable[i] = 0;
        for (std::size_t j = 0; j < m; ++j) next.servable[i] |= !is_unservable(next.weights(i, j));
      }
      cur = next;
    }
  }
}

TEST(Dynamic, NoChangeIsNoOp) {
  std::mt19937_64 rng(25);
  const auto snap = random_snapshot(5, 3, rng);
  DynamicAssociator gda(3);
  EXPECT_EQ(gda.update(snap).admitted, 5u);
  const auto before = gda.matching().row_dual;
  const auto st = gda.update(snap);
  EXPECT_EQ(st.admitted, 0u);
  EXPECT_EQ(st.changed, 0u);
  EXPECT_EQ(gda.matching().row_dual, before);
}
