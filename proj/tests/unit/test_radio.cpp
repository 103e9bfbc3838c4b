#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "wlanassoc/mac.hpp"
#include "wlanassoc/phy.hpp"
#include "wlanassoc/stats.hpp"
#include "wlanassoc/topology.hpp"

using namespace wlanassoc;

TEST(Units, DecibelConversions) {
  EXPECT_DOUBLE_EQ(db_to_linear(10.0), 10.0);
  EXPECT_DOUBLE_EQ(db_to_linear(0.0), 1.0);
  EXPECT_NEAR(dbm_to_mw(12.0), 15.848931924611133, 1e-12);
  EXPECT_NEAR(linear_to_db(100.0), 20.0, 1e-12);
}

TEST(Seeds, DerivedStreamsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base = 0; base < 20; ++base)
    for (auto s : {Stream::geometry, Stream::channel, Stream::mac, Stream::arrival_order, Stream::dynamic, Stream::mobility})
      seen.insert(derive_seed(base, s));
  EXPECT_EQ(seen.size(), 120u);
  EXPECT_EQ(derive_seed(7, Stream::mac), derive_seed(7, Stream::mac));
}

TEST(Pathloss, LogDistanceByHand) {
  RadioParams r;
  r.reference_loss_db = 40.0;
  r.pathloss_exponent = 3.0;
  EXPECT_NEAR(pathloss_db(10.0, r), 70.0, 1e-12);
  EXPECT_NEAR(pathloss_db(100.0, r), 100.0, 1e-12);
  EXPECT_NEAR(pathloss_db(0.2, r), 40.0, 1e-12);  // clamped at the reference distance
  EXPECT_NEAR(rss_dbm(12.0, 10.0, r), -58.0, 1e-12);
  EXPECT_NEAR(large_scale_gain(10.0, r), 1e-7, 1e-20);
}

TEST(Pathloss, FreeSpaceReference) {
  // 20 log10(4 pi f / c) at 1 m, 2.4 GHz: 4 pi 2.4e9 / 299792458 = 100.6006.
  EXPECT_NEAR(free_space_loss_db(2.4e9, 1.0), 20.0 * std::log10(100.60056), 1e-6);
  EXPECT_NEAR(free_space_loss_db(2.4e9, 10.0), free_space_loss_db(2.4e9, 1.0) + 20.0, 1e-12);
}

TEST(Pathloss, CcaRangeInvertsRss) {
  RadioParams r;
  r.csr_mode = CsrMode::cca_derived;
  const double d = cca_range_m(r);
  EXPECT_NEAR(rss_dbm(r.tx_power_dbm, d, r), r.cca_threshold_dbm, 1e-9);
  EXPECT_DOUBLE_EQ(effective_csr_m(r), d);
  r.csr_mode = CsrMode::fixed;
  EXPECT_DOUBLE_EQ(effective_csr_m(r), r.csr_m);
}

TEST(Noise, MinusHundredDbmOverChannel) {
  RadioParams r;
  EXPECT_NEAR(r.noise_power_dbm(), -100.0, 1e-9);
  EXPECT_NEAR(r.noise_floor_dbm_per_hz, -173.0103, 1e-4);
}

TEST(Topology, PoissonCountMoments) {
  const Intensities in{0.5, 0.1, 200.0};
  const Area area{200.0, 200.0};
  const int trials = 4000;
  double sn = 0.0, sn2 = 0.0, sm = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto g = generate_ppp(in, area, derive_seed(static_cast<std::uint64_t>(t), Stream::geometry));
    const double n = static_cast<double>(g.num_stas());
    sn += n;
    sn2 += n * n;
    sm += static_cast<double>(g.num_aps());
    for (const auto& p : g.sta_positions) ASSERT_TRUE(area.contains(p));
  }
  const double mean = sn / trials;
  const double var = sn2 / trials - mean * mean;
  EXPECT_NEAR(mean, 100.0, 4 * std::sqrt(100.0 / trials));
  EXPECT_NEAR(var / mean, 1.0, 0.1);  // Poisson: variance equals mean
  EXPECT_NEAR(sm / trials, 20.0, 4 * std::sqrt(20.0 / trials));
}

TEST(Topology, UniformPositionMoments) {
  const Area area{200.0, 100.0};
  const auto g = generate_uniform(20000, 1, area, 5);
  double sx = 0.0, sy = 0.0;
  for (const auto& p : g.sta_positions) {
    sx += p.x;
    sy += p.y;
  }
  EXPECT_NEAR(sx / 20000.0, 100.0, 4 * 200.0 / std::sqrt(12.0 * 20000.0));
  EXPECT_NEAR(sy / 20000.0, 50.0, 4 * 100.0 / std::sqrt(12.0 * 20000.0));
}

TEST(Topology, ZeroApsForcedToOne) {
  const auto g = generate_ppp({0.5, 0.0, 200.0}, {200.0, 200.0}, 3);
  EXPECT_EQ(g.num_aps(), 1u);
  EXPECT_TRUE(g.ap_count_adjusted);
}

TEST(Topology, CandidatesBySensitivity) {
  RadioParams r;
  NetworkGeometry g;
  g.area = {200.0, 200.0};
  g.sta_positions = {{0.0, 0.0}};
  // Range where RSS equals the sensitivity.
  const double edge = std::pow(10.0, (r.tx_power_dbm - r.reference_loss_db - r.receiver_sensitivity_dbm) /
                                         (10.0 * r.pathloss_exponent));
  g.ap_positions = {{edge * 1.01, 0.0}, {edge * 0.5, 0.0}, {edge * 0.9, 0.0}, {0.0, edge * 0.5}};
  EXPECT_EQ(candidate_aps(0, g, r), (std::vector<std::size_t>{1, 3, 2}));
}

namespace {

ChannelMatrix from(std::initializer_list<std::initializer_list<std::complex<double>>> rows) {
  ChannelMatrix h{CMatrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()))};
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (const auto& v : row) h.entries(r, c++) = v;
    ++r;
  }
  return h;
}

}  // namespace

TEST(ZeroForcing, InvertsRandomChannels) {
  PhyParams p;
  p.num_rx = 8;
  for (int u : {2, 4}) {
    p.num_tx = u;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto h = draw_channel(1e-6, p, s);
      const auto w = zf_beamformer(h);
      const CMatrix err = w.weights * h.entries - CMatrix::Identity(u, u);
      EXPECT_LT(err.norm(), 1e-8);
      EXPECT_FALSE(w.regularized);
    }
  }
}

TEST(ZeroForcing, HandChannel) {
  // H = [[2,0],[0,1],[0,0]]: W = (H^H H)^-1 H^H = [[1/2,0,0],[0,1,0]].
  const auto h = from({{2.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}});
  const auto w = zf_beamformer(h);
  EXPECT_NEAR(std::abs(w.weights(0, 0) - 0.5), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(w.weights(1, 1) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(w.conditioning, 4.0, 1e-12);
}

TEST(ZeroForcing, RankDeficientIsRegularized) {
  const auto h = from({{1.0, 1.0}, {1.0, 1.0}, {0.0, 0.0}});
  const auto w = zf_beamformer(h);
  EXPECT_TRUE(w.regularized);
  EXPECT_TRUE(w.weights.allFinite());
}

TEST(ZeroForcing, FadingPowerMatchesGain) {
  PhyParams p;
  double sum = 0.0;
  const int draws = 4000;
  for (int s = 0; s < draws; ++s) sum += draw_channel(2.0, p, static_cast<std::uint64_t>(s)).entries.squaredNorm();
  const double per_entry = sum / draws / (p.num_rx * p.num_tx);
  EXPECT_NEAR(per_entry, 2.0, 0.03);
}

TEST(Sinr, HandComputedPowerConsistent) {
  PhyParams p;
  p.num_tx = 2;
  p.num_rx = 3;
  p.symbol_energy = 4.0;
  p.noise_variance = 0.1;
  const auto h = from({{2.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}});
  const auto w = zf_beamformer(h);
  // Desired: (E/U) ||WH||^2 = 2 * 2 = 4; noise ||W||^2 sigma^2 = 1.25 * 0.1.
  const auto hz = from({{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
  const auto wz = zf_beamformer(from({{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}}));
  // Interferer leakage: (E/U) ||W_z H_z||^2 with W_z = [I 0]: H_z rows 0..1 are zero.
  const auto cross = from({{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
  const Interferer zs[] = {{wz, cross}};
  EXPECT_NEAR(desired_power(w, h, p), 4.0, 1e-12);
  EXPECT_NEAR(noise_power(w, p), 0.125, 1e-12);
  EXPECT_NEAR(interference_power(wz, cross, p), 2.0, 1e-12);
  EXPECT_NEAR(compute_sinr(w, h, zs, p), 4.0 / (0.125 + 2.0), 1e-12);
  const Interferer none[] = {{wz, hz}};
  EXPECT_NEAR(compute_sinr(w, h, none, p), 4.0 / 0.125, 1e-12);
}

TEST(Sinr, LiteralFormScaling) {
  PhyParams p;
  p.num_tx = 2;
  p.num_rx = 2;
  p.symbol_energy = 8.0;
  p.noise_variance = 1.0;
  p.literal_sinr = true;
  const auto h = from({{1.0, 0.0}, {0.0, 1.0}});
  const auto w = zf_beamformer(h);
  // sqrt(E/U) * ||WH||^2 = 2 * 2.
  EXPECT_NEAR(desired_power(w, h, p), 4.0, 1e-12);
  EXPECT_NEAR(interference_power(w, h, p), 2.0, 1e-12);
}

TEST(Rate, Shannon) {
  EXPECT_DOUBLE_EQ(channel_rate(1.0, 20e6), 20e6);
  EXPECT_DOUBLE_EQ(channel_rate(3.0, 20e6), 40e6);
  EXPECT_DOUBLE_EQ(channel_rate(0.0, 20e6), 0.0);
  EXPECT_THROW(channel_rate(-1.0, 20e6), std::invalid_argument);
}

TEST(Mac, DelayFromDefaults) {
  const MacParams m;
  // DIFS 50 + SIFS 10 + 1024 * 20 / 2 + ACK 64 microseconds.
  EXPECT_NEAR(mac_delay(m), 10364e-6, 1e-12);
  EXPECT_NEAR(m.rts_cts_overhead_s, 34 * 8 / 6e6 + 20e-6, 1e-15);
  EXPECT_NEAR(exchange_delay(m), mac_delay(m) + m.rts_cts_overhead_s, 1e-15);
  EXPECT_DOUBLE_EQ(m.frame_bits(), 1522.0 * 8.0);
}

TEST(Mac, FrameTimeEdges) {
  EXPECT_DOUBLE_EQ(frame_time(12000.0, 12e6), 1e-3);
  EXPECT_TRUE(std::isinf(frame_time(12000.0, 0.0)));
  EXPECT_EQ(frame_time(0.0, 0.0), 0.0);
  EXPECT_EQ(effective_throughput(std::numeric_limits<double>::infinity(), 0.01, 2), 0.0);
  EXPECT_THROW(effective_throughput(0.0, 0.0, 2), std::invalid_argument);
}

TEST(Mac, UtilityChainByHand) {
  // SINR 3 -> rate 40 Mb/s -> t = 12176 / 40e6 -> beta = log2(4) / (t + tau).
  const MacParams m;
  const double rate = 20e6 * 2.0;
  const double t = 12176.0 / rate;
  EXPECT_NEAR(frame_time(m.frame_bits(), channel_rate(3.0, 20e6)), t, 1e-15);
  const double tau = 0.010364;
  const double beta = 2.0 / (t + tau);
  EXPECT_NEAR(effective_throughput(t, tau, 4), beta, 1e-12 * beta);
  EXPECT_NEAR(utility(beta, {0.5}), 2.0 * std::sqrt(beta), 1e-12);
  EXPECT_NEAR(utility(beta, {1.0}), std::log(beta), 1e-12);
  EXPECT_NEAR(utility(beta, {2.0}), -1.0 / beta, 1e-12);
  EXPECT_NEAR(utility(beta, {0.0}), beta, 1e-12);
  EXPECT_NEAR(goodput_bps(12000.0, t, tau), 12000.0 / (t + tau), 1e-6);
}

TEST(Mac, UtilityFamilyLimits) {
  const double beta = 37.0;
  EXPECT_NEAR(utility_shifted(beta, {1.0 + 1e-7}), std::log(beta), 1e-5);
  EXPECT_NEAR(utility_shifted(beta, {1.0 - 1e-7}), std::log(beta), 1e-5);
  EXPECT_TRUE(is_unservable(utility(0.0, {1.0})));
  EXPECT_TRUE(is_unservable(utility(0.0, {2.0})));
  EXPECT_EQ(utility(0.0, {0.5}), 0.0);
  EXPECT_THROW(utility(1.0, {-0.1}), std::invalid_argument);
}

TEST(Stats, PercentileByHand) {
  const std::vector<double> xs{5, 1, 4, 2, 3};
  EXPECT_DOUBLE_EQ(percentile(xs, 0), 1.0);
  EXPECT_DOUBLE_EQ(percentile(xs, 50), 3.0);
  EXPECT_DOUBLE_EQ(percentile(xs, 100), 5.0);
  EXPECT_DOUBLE_EQ(percentile(xs, 10), 1.4);  // position 0.4
  EXPECT_DOUBLE_EQ(percentile(xs, 90), 4.6);
  EXPECT_THROW(percentile({}, 50), std::invalid_argument);
}

TEST(Stats, StudentIntervalByHand) {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const Summary s = summarize(xs);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_NEAR(s.stddev, std::sqrt(2.5), 1e-12);
  const double half = 2.7764451051977987 * std::sqrt(2.5) / std::sqrt(5.0);  // t(0.975, 4)
  EXPECT_NEAR(s.ci_lo, 3.0 - half, 1e-9);
  EXPECT_NEAR(s.ci_hi, 3.0 + half, 1e-9);
  const Summary one = summarize(std::vector<double>{2.0});
  EXPECT_EQ(one.ci_lo, 2.0);
  EXPECT_EQ(one.ci_hi, 2.0);
}

TEST(Stats, IntervalCoverage) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(10.0, 3.0);
  int hit = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> xs(20);
    for (auto& x : xs) x = n(rng);
    const auto s = summarize(xs);
    hit += s.ci_lo <= 10.0 && 10.0 <= s.ci_hi;
  }
  EXPECT_NEAR(hit / static_cast<double>(trials), 0.95, 0.02);
}

TEST(Stats, EmpiricalCdfSteps) {
  const auto c = empirical_cdf({3, 1, 1, 2});
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_EQ(c.points[0].value, 1.0);
  EXPECT_DOUBLE_EQ(c.points[0].cdf, 0.5);
  EXPECT_DOUBLE_EQ(c.points[1].cdf, 0.75);
  EXPECT_DOUBLE_EQ(c.points[2].cdf, 1.0);
  EXPECT_DOUBLE_EQ(c.p50, 1.5);
}
