#pragma once

// Experiment drivers and CSV output. Sweeps store one CSV per point under
// <out>/points/ next to the resolved config; a rerun with the same config
// reuses finished points.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wlanassoc/config.hpp"
#include "wlanassoc/dynamic.hpp"
#include "wlanassoc/simcore.hpp"
#include "wlanassoc/stats.hpp"

namespace wlanassoc {

inline constexpr const char* kResultHeader = "scheme,density,n_sta,n_ap,agg_mbps,util_sum,p10,p50,p90,ci_lo,ci_hi,seed";
inline constexpr const char* kCdfHeader = "scheme,n_sta,n_ap,mbps,cdf";
inline constexpr const char* kEpochHeader = "realization,epoch,n_sta,gda_objective,gaa_objective,objectives_equal,admitted,changed";

struct ResultRow {
  std::string scheme;
  double density = 0.0;
  double n_sta = 0.0;
  double n_ap = 0.0;
  double agg_mbps = 0.0;
  double util_sum = 0.0;
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace detail

inline std::string format_row(const ResultRow& r) {
  using detail::num;
  return r.scheme + "," + num(r.density) + "," + num(r.n_sta) + "," + num(r.n_ap) + "," + num(r.agg_mbps) + "," +
         num(r.util_sum) + "," + num(r.p10) + "," + num(r.p50) + "," + num(r.p90) + "," + num(r.ci_lo) + "," +
         num(r.ci_hi) + "," + std::to_string(r.seed);
}

inline std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kResultHeader) + "\n";
  for (const auto& r : rows) out += format_row(r) + "\n";
  return out;
}

/// One row per scheme: means over realizations, CI of the aggregate.
inline std::vector<ResultRow> summarize_point(const MonteCarloResult& mc, double density, std::uint64_t seed) {
  std::vector<ResultRow> rows;
  for (const auto& s : mc.schemes) {
    const Summary agg = s.aggregate();
    ResultRow r;
    r.scheme = to_string(s.scheme);
    r.density = density;
    r.n_sta = mc.mean_n_sta();
    r.n_ap = mc.mean_n_ap();
    r.agg_mbps = agg.mean;
    r.util_sum = detail::mean_of(s.util_sum);
    r.p10 = detail::mean_of(s.p10);
    r.p50 = detail::mean_of(s.p50);
    r.p90 = detail::mean_of(s.p90);
    r.ci_lo = agg.ci_lo;
    r.ci_hi = agg.ci_hi;
    r.seed = seed;
    rows.push_back(r);
  }
  return rows;
}

/// Pooled per-user throughput CDF of every scheme.
inline std::string cdf_csv(const MonteCarloResult& mc) {
  std::string out = std::string(kCdfHeader) + "\n";
  for (const auto& s : mc.schemes) {
    const auto cdf = per_user_cdf(s.per_user_mbps);
    for (const auto& p : cdf.points)
      out += std::string(to_string(s.scheme)) + "," + detail::num(mc.mean_n_sta()) + "," + detail::num(mc.mean_n_ap()) +
             "," + detail::num(p.value) + "," + detail::num(p.cdf) + "\n";
  }
  return out;
}

/// Scenario of one density-sweep point: Poisson placement at eta_n.
inline Scenario density_scenario(const Config& c, double eta_n) {
  Scenario s = c.scenario;
  s.placement.fixed_counts = false;
  s.intensities.eta_n = eta_n;
  return s;
}

/// Scenario of one size-sweep point: n STAs, size_sweep_aps APs.
inline Scenario size_scenario(const Config& c, std::size_t n_sta) {
  Scenario s = c.scenario;
  s.placement.fixed_counts = true;
  s.placement.n_sta = n_sta;
  s.placement.n_ap = c.experiment.size_sweep_aps;
  return s;
}

inline Scenario cdf_scenario(const Config& c) {
  Scenario s = c.scenario;
  s.placement.fixed_counts = true;
  s.placement.n_sta = c.experiment.cdf_stas;
  s.placement.n_ap = c.experiment.cdf_aps;
  return s;
}

/// Point cache under <out>/points/. Stale caches (different resolved
/// config) are discarded on open.
class PointCache {
 public:
  PointCache(const std::filesystem::path& out_dir, const std::string& resolved_ini) : dir_(out_dir / "points") {
    const auto stamp = dir_ / "config.ini";
    if (std::filesystem::exists(stamp) && detail::read_text(stamp) != resolved_ini) std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
    detail::write_text(stamp, resolved_ini);
  }

  /// Cached text of a point, computing and storing it when absent.
  std::string get(const std::string& name, const std::function<std::string()>& compute) {
    const auto path = dir_ / (name + ".csv");
    if (std::filesystem::exists(path)) {
      ++reused_;
      return detail::read_text(path);
    }
    std::string text = compute();
    detail::write_text(path, text);
    return text;
  }

  std::size_t reused() const { return reused_; }

 private:
  std::filesystem::path dir_;
  std::size_t reused_ = 0;
};

/// Body lines (no header) of a cached results CSV.
inline std::string body_of(const std::string& csv) {
  const auto nl = csv.find('\n');
  return nl == std::string::npos ? std::string{} : csv.substr(nl + 1);
}

struct Progress {
  std::function<void(const std::string&)> note = [](const std::string&) {};
};

/// Single operating point: the configured placement and density.
inline MonteCarloResult run_point(const Config& c) {
  return run_monte_carlo(c.scenario, c.experiment.schemes, c.sim);
}

inline double point_density(const Scenario& s) {
  if (!s.placement.fixed_counts) return s.intensities.eta_n;
  return static_cast<double>(s.placement.n_sta) / s.intensities.n_ref;
}

/// Density sweep, size sweep and CDF capture. Writes density_sweep.csv,
/// size_sweep.csv and cdf.csv under out_dir.
inline void run_sweep(const Config& c, const std::filesystem::path& out_dir, const Progress& progress = {}) {
  PointCache cache(out_dir, to_ini(c));
  const std::uint64_t seed = c.sim.base_seed;

  std::string density = std::string(kResultHeader) + "\n";
  for (std::size_t k = 0; k < c.experiment.densities.size(); ++k) {
    const double eta = c.experiment.densities[k];
    density += body_of(cache.get("density_" + std::to_string(k), [&] {
      progress.note("density " + detail::num(eta));
      const Scenario s = density_scenario(c, eta);
      return results_csv(summarize_point(run_monte_carlo(s, c.experiment.schemes, c.sim), eta, seed));
    }));
  }
  detail::write_text(out_dir / "density_sweep.csv", density);

  std::string size = std::string(kResultHeader) + "\n";
  for (std::size_t k = 0; k < c.experiment.sizes.size(); ++k) {
    const std::size_t n = c.experiment.sizes[k];
    size += body_of(cache.get("size_" + std::to_string(k), [&] {
      progress.note("size " + std::to_string(n));
      const Scenario s = size_scenario(c, n);
      return results_csv(summarize_point(run_monte_carlo(s, c.experiment.schemes, c.sim), point_density(s), seed));
    }));
  }
  detail::write_text(out_dir / "size_sweep.csv", size);

  const std::string cdf = cache.get("cdf", [&] {
    progress.note("cdf");
    return cdf_csv(run_monte_carlo(cdf_scenario(c), c.experiment.schemes, c.sim));
  });
  detail::write_text(out_dir / "cdf.csv", cdf);
}

/// dynamic.csv: one row per scheme and epoch in the result schema, density
/// being n_sta / n_ref. dynamic_epochs.csv: per-realization optimality log.
inline void write_dynamic(const DynamicResult& r, double n_ref, std::size_t n_aps, std::uint64_t seed,
                          const std::filesystem::path& out_dir) {
  std::vector<ResultRow> rows;
  const std::size_t epochs = r.runs.empty() ? 0 : r.runs.front().size();
  for (const Scheme s : r.schemes)
    for (std::size_t e = 0; e < epochs; ++e) {
      const Summary sm = summarize(r.samples(s, e));
      double n = 0.0;
      for (const auto& run : r.runs) n += static_cast<double>(run[e].n_sta);
      n /= static_cast<double>(r.runs.size());
      ResultRow row;
      row.scheme = to_string(s);
      row.density = n / n_ref;
      row.n_sta = n;
      row.n_ap = static_cast<double>(n_aps);
      row.agg_mbps = sm.mean;
      row.util_sum = detail::mean_of(r.column(s, e, &EpochRecord::util_sum));
      row.p10 = detail::mean_of(r.column(s, e, &EpochRecord::p10));
      row.p50 = detail::mean_of(r.column(s, e, &EpochRecord::p50));
      row.p90 = detail::mean_of(r.column(s, e, &EpochRecord::p90));
      row.ci_lo = sm.ci_lo;
      row.ci_hi = sm.ci_hi;
      row.seed = seed;
      rows.push_back(row);
    }
  detail::write_text(out_dir / "dynamic.csv", results_csv(rows));

  std::string log = std::string(kEpochHeader) + "\n";
  for (std::size_t k = 0; k < r.runs.size(); ++k)
    for (const auto& e : r.runs[k]) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.17g,%.17g,%d,%zu,%zu\n", k, e.epoch, e.n_sta, e.gda_objective,
                    e.gaa_objective, e.objectives_equal ? 1 : 0, e.admitted, e.changed);
      log += buf;
    }
  detail::write_text(out_dir / "dynamic_epochs.csv", log);
}

inline void write_manifest(const Config& c, const std::filesystem::path& out_dir, const std::string& build_tag,
                           const std::string& verb) {
  auto m = to_manifest(c, build_tag);
  m["verb"] = verb;
  detail::write_text(out_dir / "manifest.json", m.dump(2) + "\n");
  detail::write_text(out_dir / "config.ini", to_ini(c));
}

}  // namespace wlanassoc
