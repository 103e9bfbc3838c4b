#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wlanassoc.hpp"

#ifndef WLANASSOC_BUILD_TAG
#define WLANASSOC_BUILD_TAG "unknown"
#endif

namespace {

using namespace wlanassoc;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> realizations;
  std::optional<std::size_t> slots;
  std::optional<std::string> schemes;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "INI config, or a manifest.json from an earlier run");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--realizations", f.realizations, "Monte Carlo realizations (dynamic: dynamic.realizations)");
  cmd->add_option("--slots", f.slots, "slots per realization");
  cmd->add_option("--schemes", f.schemes, "comma-separated list of ssf,gaa,smartassoc,greedy,bpf");
}

Config resolve(const Flags& f, bool dynamic_verb) {
  Config c = f.config.empty() ? parse_ini("") : load_config(f.config);
  if (f.seed) c.sim.base_seed = *f.seed;
  if (f.out) c.experiment.out_dir = *f.out;
  if (f.realizations) (dynamic_verb ? c.dynamic.realizations : c.sim.n_realizations) = *f.realizations;
  if (f.slots) c.sim.n_slots = *f.slots;
  if (f.schemes) detail::apply(c, "experiment", "schemes", *f.schemes);
  validate(c);
  return c;
}

void print_rows(const std::vector<ResultRow>& rows) {
  std::printf("%-11s %9s %8s %10s %10s %10s %10s\n", "scheme", "n_sta", "n_ap", "agg_mbps", "ci_lo", "ci_hi", "p10");
  for (const auto& r : rows)
    std::printf("%-11s %9.1f %8.1f %10.3f %10.3f %10.3f %10.4f\n", r.scheme.c_str(), r.n_sta, r.n_ap, r.agg_mbps,
                r.ci_lo, r.ci_hi, r.p10);
}

int cmd_run(const Config& c) {
  const std::filesystem::path out = c.experiment.out_dir;
  const MonteCarloResult mc = run_point(c);
  const auto rows = summarize_point(mc, point_density(c.scenario), c.sim.base_seed);
  detail::write_text(out / "results.csv", results_csv(rows));
  detail::write_text(out / "cdf.csv", cdf_csv(mc));
  write_manifest(c, out, WLANASSOC_BUILD_TAG, "run");
  print_rows(rows);
  if (mc.uncovered) std::printf("uncovered STAs (all realizations): %zu\n", mc.uncovered);
  if (mc.ap_adjusted) std::printf("realizations with an added AP: %zu\n", mc.ap_adjusted);
  return 0;
}

int cmd_sweep(const Config& c) {
  const std::filesystem::path out = c.experiment.out_dir;
  Progress p;
  p.note = [](const std::string& what) { std::fprintf(stderr, "point: %s\n", what.c_str()); };
  write_manifest(c, out, WLANASSOC_BUILD_TAG, "sweep");
  run_sweep(c, out, p);
  std::printf("wrote %s\n", (out / "density_sweep.csv").c_str());
  std::printf("wrote %s\n", (out / "size_sweep.csv").c_str());
  std::printf("wrote %s\n", (out / "cdf.csv").c_str());
  return 0;
}

int cmd_dynamic(const Config& c) {
  const std::filesystem::path out = c.experiment.out_dir;
  const DynamicResult r = run_dynamic(c.scenario, c.dynamic, c.experiment.schemes, c.sim);
  write_dynamic(r, c.scenario.intensities.n_ref, c.dynamic.n_aps, c.sim.base_seed, out);
  write_manifest(c, out, WLANASSOC_BUILD_TAG, "dynamic");
  const std::size_t last = c.dynamic.epochs - 1;
  std::printf("final epoch (%zu STAs):\n", c.dynamic.final_stas);
  for (const Scheme s : r.schemes) {
    const Summary sm = summarize(r.samples(s, last));
    std::printf("  %-11s %10.3f Mbps  [%.3f, %.3f]\n", to_string(s), sm.mean, sm.ci_lo, sm.ci_hi);
  }
  std::printf("incremental objective equals fresh solve at every epoch: %s\n", r.all_objectives_equal() ? "yes" : "no");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dense-WLAN user/AP association workbench"};
  app.require_subcommand(1);
  Flags run_f, val_f, sweep_f, dyn_f;
  auto* run = app.add_subcommand("run", "simulate the configured operating point");
  auto* val = app.add_subcommand("validate", "check a config and print it with defaults resolved");
  auto* sweep = app.add_subcommand("sweep", "density sweep, network-size sweep and CDF capture");
  auto* dyn = app.add_subcommand("dynamic", "growing network with mobile STAs");
  add_flags(run, run_f);
  add_flags(val, val_f);
  add_flags(sweep, sweep_f);
  add_flags(dyn, dyn_f);
  CLI11_PARSE(app, argc, argv);

  try {
    if (*val) {
      std::cout << to_ini(resolve(val_f, false));
      return 0;
    }
    if (*run) return cmd_run(resolve(run_f, false));
    if (*sweep) return cmd_sweep(resolve(sweep_f, false));
    if (*dyn) return cmd_dynamic(resolve(dyn_f, true));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
