#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "wlanassoc/config.hpp"
#include "wlanassoc/experiment.hpp"

using namespace wlanassoc;

namespace {

std::string field_of(const std::string& ini) {
  try {
    parse_ini(ini);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("wlanassoc_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

Config tiny() {
  Config c = parse_ini(R"(
[density]
eta_n = 0.2
eta_m = 0.05
[sim]
slots = 60
realizations = 3
[experiment]
schemes = ssf, gaa
densities = 0.1, 0.2
sizes = 10
size_sweep_aps = 4
cdf_stas = 10
cdf_aps = 3
)");
  return c;
}

}  // namespace

TEST(Config, EmptyGivesDefaults) {
  const Config c = parse_ini("");
  EXPECT_EQ(c.scenario.mac.cw_max, 1024);
  EXPECT_EQ(c.scenario.num_tx, 4);
  EXPECT_EQ(c.scenario.num_rx, 8);
  EXPECT_DOUBLE_EQ(c.scenario.fairness.delta, 0.5);
  EXPECT_EQ(c.sim.n_slots, 1000u);
  EXPECT_EQ(c.experiment.schemes.size(), 5u);
  EXPECT_EQ(c.experiment.densities.size(), 10u);
}

TEST(Config, ReadsValuesAndUnits) {
  const Config c = parse_ini("[mac]\nsifs_us = 16\nslot_us = 9\npayload_bytes = 1000\n[phy]\nnum_tx = 2\n");
  EXPECT_DOUBLE_EQ(c.scenario.mac.sifs_s, 16e-6);
  EXPECT_DOUBLE_EQ(c.scenario.mac.difs_s, 16e-6 + 2 * 9e-6);  // derived when not given
  EXPECT_DOUBLE_EQ(c.scenario.mac.payload_bits, 8000.0);
  EXPECT_EQ(c.scenario.num_tx, 2);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(field_of("[mac]\nfoo = 1\n"), "mac.foo");
  EXPECT_EQ(field_of("[nonsense]\na = 1\n"), "nonsense");
  EXPECT_EQ(field_of("[association]\ndelta = -1\n"), "association.delta");
  EXPECT_EQ(field_of("[phy]\nnum_tx = 9\n"), "phy.num_rx");
  EXPECT_EQ(field_of("[radio]\ncsr_m = abc\n"), "radio.csr_m");
  EXPECT_EQ(field_of("[sim]\nslots = 0\n"), "sim.slots");
  EXPECT_EQ(field_of("[experiment]\nschemes = ssf,best\n"), "experiment.schemes");
  EXPECT_EQ(field_of("[mac]\ncw_max = 8\n"), "mac.cw_max");
  EXPECT_EQ(field_of("[association]\ncapacity = some\n"), "association.capacity");
  EXPECT_EQ(field_of("[sim]\nseed = -3\n"), "sim.seed");
}

TEST(Config, IniRoundTrip) {
  Config c = parse_ini("[radio]\ncsr_mode = cca_derived\n[association]\ncapacity = balanced\n");
  c.scenario.mac.sifs_s = 1.0 / 3.0 * 1e-5;
  const std::string once = to_ini(c);
  const std::string twice = to_ini(parse_ini(once));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(parse_ini(once).scenario.mac.sifs_s, c.scenario.mac.sifs_s);
}

TEST(Config, ManifestRoundTrip) {
  const Config c = tiny();
  const auto m = to_manifest(c, "test");
  EXPECT_EQ(m["build"], "test");
  const Config back = config_from_manifest(nlohmann::json::parse(m.dump()));
  EXPECT_EQ(to_ini(back), to_ini(c));
}

TEST(Config, ManifestReingestReproducesResults) {
  const Config c = tiny();
  const auto dir = temp_dir("manifest");
  write_manifest(c, dir, "test", "run");
  const Config back = load_config((dir / "manifest.json").string());
  const auto a = results_csv(summarize_point(run_point(c), 0.2, c.sim.base_seed));
  const auto b = results_csv(summarize_point(run_point(back), 0.2, back.sim.base_seed));
  EXPECT_EQ(a, b);
  const Config ini = load_config((dir / "config.ini").string());
  EXPECT_EQ(to_ini(ini), to_ini(c));
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/x.ini"), ConfigError);
}

TEST(Experiment, ResultRowFormat) {
  ResultRow r;
  r.scheme = "gaa";
  r.density = 0.5;
  r.agg_mbps = 12.25;
  r.seed = 7;
  EXPECT_EQ(format_row(r), "gaa,0.500000,0.000000,0.000000,12.250000,0.000000,0.000000,0.000000,0.000000,0.000000,0.000000,7");
  EXPECT_EQ(results_csv({}), std::string(kResultHeader) + "\n");
}

TEST(Experiment, SweepWritesTablesAndResumes) {
  const Config c = tiny();
  const auto dir = temp_dir("sweep");
  run_sweep(c, dir);
  const auto density = detail::read_text(dir / "density_sweep.csv");
  // Header plus one row per scheme and density.
  EXPECT_EQ(std::count(density.begin(), density.end(), '\n'), 1 + 2 * 2);
  EXPECT_EQ(density.rfind(kResultHeader, 0), 0u);
  EXPECT_TRUE(std::filesystem::exists(dir / "size_sweep.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "cdf.csv"));

  // Resume: a finished point is not recomputed.
  std::filesystem::remove(dir / "density_sweep.csv");
  std::ofstream(dir / "points" / "density_0.csv") << kResultHeader << "\nmarker\n";
  run_sweep(c, dir);
  EXPECT_NE(detail::read_text(dir / "density_sweep.csv").find("marker"), std::string::npos);

  // A changed config discards stale points.
  Config d = c;
  d.sim.base_seed = 99;
  run_sweep(d, dir);
  EXPECT_EQ(detail::read_text(dir / "density_sweep.csv").find("marker"), std::string::npos);
}

TEST(Experiment, SweepIsByteIdenticalAcrossRuns) {
  const Config c = tiny();
  const auto a = temp_dir("same_a");
  const auto b = temp_dir("same_b");
  run_sweep(c, a);
  run_sweep(c, b);
  for (const char* f : {"density_sweep.csv", "size_sweep.csv", "cdf.csv"})
    EXPECT_EQ(detail::read_text(a / f), detail::read_text(b / f)) << f;
}

TEST(Experiment, DynamicTables) {
  Config c = tiny();
  c.dynamic.initial_stas = 4;
  c.dynamic.final_stas = 10;
  c.dynamic.n_aps = 3;
  c.dynamic.epochs = 4;
  c.dynamic.epoch_slots = 10;
  c.dynamic.realizations = 2;
  const auto r = run_dynamic(c.scenario, c.dynamic, c.experiment.schemes, c.sim);
  const auto dir = temp_dir("dynamic");
  write_dynamic(r, c.scenario.intensities.n_ref, c.dynamic.n_aps, c.sim.base_seed, dir);
  const auto t = detail::read_text(dir / "dynamic.csv");
  EXPECT_EQ(t.rfind(kResultHeader, 0), 0u);
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 1 + 2 * 4);
  const auto log = detail::read_text(dir / "dynamic_epochs.csv");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 1 + 2 * 4);
}
