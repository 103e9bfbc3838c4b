#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace wlanassoc {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Mean with a two-sided Student-t confidence interval.
inline Summary summarize(std::span<const double> xs, double confidence = 0.95) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  s.ci_lo = s.ci_hi = s.mean;
  if (xs.size() < 2) return s;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  boost::math::students_t t(static_cast<double>(xs.size() - 1));
  const double q = boost::math::quantile(boost::math::complement(t, (1.0 - confidence) / 2.0));
  const double half = q * s.stddev / std::sqrt(static_cast<double>(xs.size()));
  s.ci_lo = s.mean - half;
  s.ci_hi = s.mean + half;
  return s;
}

/// Percentile with linear interpolation between order statistics
/// (p in [0, 100]; position (n-1)p/100).
inline double percentile(std::vector<double> xs, double p) {
  if (xs.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (p < 0.0 || p > 100.0) throw std::invalid_argument("percentile must be in [0, 100]");
  std::sort(xs.begin(), xs.end());
  const double pos = (static_cast<double>(xs.size()) - 1.0) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

struct CdfPoint {
  double value = 0.0;
  double cdf = 0.0;
};

struct EmpiricalCdf {
  std::vector<CdfPoint> points;  // one per distinct value, cdf = share <= value
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
};

inline EmpiricalCdf empirical_cdf(std::vector<double> xs) {
  EmpiricalCdf out;
  if (xs.empty()) return out;
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k + 1 < xs.size() && xs[k + 1] == xs[k]) continue;
    out.points.push_back({xs[k], static_cast<double>(k + 1) / n});
  }
  out.p10 = percentile(xs, 10.0);
  out.p50 = percentile(xs, 50.0);
  out.p90 = percentile(xs, 90.0);
  return out;
}

}  // namespace wlanassoc
