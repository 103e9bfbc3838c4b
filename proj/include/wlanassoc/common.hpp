#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace wlanassoc {

/// Edge weight (and utility) assigned to links that cannot carry traffic:
/// APs below receiver sensitivity, zero-rate links and SINR-filtered edges.
/// Kept finite so the assignment solver never sees an infinity.
inline constexpr double kUnservable = -1e12;

inline bool is_unservable(double w) { return w <= kUnservable * 0.5; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }

// splitmix64 finalizer; used to derive independent per-purpose seeds from a
// single base seed so that no two RNG streams share state.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = mix_seed(base);
  for (auto t : tags) s = mix_seed(s ^ mix_seed(t + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream tags for derive_seed.
enum class Stream : std::uint64_t {
  geometry = 1,
  channel = 2,
  mac = 3,
  arrival_order = 4,
  dynamic = 5,
  mobility = 6,
};

inline std::uint64_t derive_seed(std::uint64_t base, Stream s) {
  return derive_seed(base, {static_cast<std::uint64_t>(s)});
}

}  // namespace wlanassoc
