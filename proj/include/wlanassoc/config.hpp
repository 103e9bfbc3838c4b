#pragma once

// INI configuration: sections area, density, radio, phy, mac, association,
// sim, experiment, dynamic. Every key is optional; unknown sections or keys
// are rejected. A resolved config serializes back to INI and to a JSON
// manifest, and either form loads again to the same values.

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "wlanassoc/association.hpp"
#include "wlanassoc/dynamic.hpp"
#include "wlanassoc/scenario.hpp"
#include "wlanassoc/simcore.hpp"

namespace wlanassoc {

struct ExperimentParams {
  std::vector<Scheme> schemes{Scheme::ssf, Scheme::gaa, Scheme::smartassoc, Scheme::greedy, Scheme::bpf};
  std::vector<double> densities{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<std::size_t> sizes{20, 40, 60, 80, 100, 120, 140, 160, 180, 198};
  std::size_t size_sweep_aps = 35;
  std::size_t cdf_stas = 100;
  std::size_t cdf_aps = 20;
  std::string out_dir = "out";
};

struct Config {
  Scenario scenario;
  SimParams sim;
  DynamicParams dynamic;
  ExperimentParams experiment;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& field, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + v + "'");
  }
}

inline long long to_int(const std::string& field, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long d = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected an integer, got '" + v + "'");
  }
}

inline std::uint64_t to_u64(const std::string& field, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const unsigned long long d = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a non-negative integer, got '" + v + "'");
  }
}

inline std::size_t to_count(const std::string& field, const std::string& v) {
  const long long x = to_int(field, v);
  if (x < 0) throw ConfigError(field, "must be >= 0");
  return static_cast<std::size_t>(x);
}

inline bool to_bool(const std::string& field, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(field, "expected true/false, got '" + v + "'");
}

inline std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Shortest decimal x with parse(x) * scale == v, so scaled fields
// round-trip exactly.
// Shortest text t with stod(t) / per_unit == v, so stored values round-trip.
inline std::string fmt_scaled(double v, double per_unit) {
  const std::string plain = fmt(v * per_unit);
  if (std::stod(plain) / per_unit == v) return plain;
  char buf[40];
  for (int p = 1; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v * per_unit);
    if (std::stod(buf) / per_unit == v) return buf;
  }
  return fmt(v * per_unit);
}

inline std::string fmt(bool v) { return v ? "true" : "false"; }

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) out += ",";
    if constexpr (std::is_same_v<T, Scheme>)
      out += to_string(xs[k]);
    else if constexpr (std::is_floating_point_v<T>)
      out += fmt(xs[k]);
    else
      out += std::to_string(xs[k]);
  }
  return out;
}

// Ordered (section, key) -> value table: the single source for both the
// reader and the writers.
using Table = std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>;

inline Table to_table(const Config& c) {
  const Scenario& s = c.scenario;
  const auto& r = s.radio;
  const auto& m = s.mac;
  return {
      {"area", {{"width_m", fmt(s.area.width_m)}, {"height_m", fmt(s.area.height_m)}}},
      {"density",
       {{"eta_n", fmt(s.intensities.eta_n)},
        {"eta_m", fmt(s.intensities.eta_m)},
        {"n_ref", fmt(s.intensities.n_ref)},
        {"fixed_counts", fmt(s.placement.fixed_counts)},
        {"n_sta", std::to_string(s.placement.n_sta)},
        {"n_ap", std::to_string(s.placement.n_ap)}}},
      {"radio",
       {{"tx_power_dbm", fmt(r.tx_power_dbm)},
        {"noise_floor_dbm_per_hz", fmt(r.noise_floor_dbm_per_hz)},
        {"bandwidth_hz", fmt(r.bandwidth_hz)},
        {"pathloss_exponent", fmt(r.pathloss_exponent)},
        {"reference_distance_m", fmt(r.reference_distance_m)},
        {"reference_loss_db", fmt(r.reference_loss_db)},
        {"cca_threshold_dbm", fmt(r.cca_threshold_dbm)},
        {"receiver_sensitivity_dbm", fmt(r.receiver_sensitivity_dbm)},
        {"csr_m", fmt(r.csr_m)},
        {"csr_mode", r.csr_mode == CsrMode::fixed ? "fixed" : "cca_derived"}}},
      {"phy", {{"num_tx", std::to_string(s.num_tx)}, {"num_rx", std::to_string(s.num_rx)}, {"literal_sinr", fmt(s.literal_sinr)}}},
      {"mac",
       {{"payload_bytes", fmt_scaled(m.payload_bits, 0.125)},
        {"header_bytes", fmt_scaled(m.header_bits, 0.125)},
        {"sifs_us", fmt_scaled(m.sifs_s, 1e6)},
        {"slot_us", fmt_scaled(m.slot_time_s, 1e6)},
        {"difs_us", fmt_scaled(m.difs_s, 1e6)},
        {"ack_us", fmt_scaled(m.ack_s, 1e6)},
        {"cw_min", std::to_string(m.cw_min)},
        {"cw_max", std::to_string(m.cw_max)},
        {"mcs_order", std::to_string(m.mcs_order)},
        {"rts_cts_overhead_us", fmt_scaled(m.rts_cts_overhead_s, 1e6)},
        {"bss_contention", fmt(s.bss_contention)}}},
      {"association",
       {{"delta", fmt(s.fairness.delta)},
        {"gamma_db", fmt(s.association.sinr_threshold_db)},
        {"sinr_filter", fmt(s.association.sinr_filter)},
        {"weight_iterations", std::to_string(s.association.weight_iterations)},
        {"capacity", s.association.capacity == CapacityMode::uncapped ? "uncapped" : "balanced"},
        {"shuffle_arrivals", fmt(s.association.shuffle_arrivals)}}},
      {"sim",
       {{"slots", std::to_string(c.sim.n_slots)},
        {"realizations", std::to_string(c.sim.n_realizations)},
        {"arrival_rate", fmt(c.sim.arrival_rate)},
        {"buffer_limit", std::to_string(c.sim.buffer_limit)},
        {"retry_limit", std::to_string(c.sim.retry_limit)},
        {"decode_threshold_db", fmt(c.sim.decode_threshold_db)},
        {"seed", std::to_string(c.sim.base_seed)},
        {"workers", std::to_string(c.sim.workers)}}},
      {"experiment",
       {{"schemes", join(c.experiment.schemes)},
        {"densities", join(c.experiment.densities)},
        {"sizes", join(c.experiment.sizes)},
        {"size_sweep_aps", std::to_string(c.experiment.size_sweep_aps)},
        {"cdf_stas", std::to_string(c.experiment.cdf_stas)},
        {"cdf_aps", std::to_string(c.experiment.cdf_aps)},
        {"out_dir", c.experiment.out_dir}}},
      {"dynamic",
       {{"initial_stas", std::to_string(c.dynamic.initial_stas)},
        {"final_stas", std::to_string(c.dynamic.final_stas)},
        {"n_aps", std::to_string(c.dynamic.n_aps)},
        {"epochs", std::to_string(c.dynamic.epochs)},
        {"epoch_slots", std::to_string(c.dynamic.epoch_slots)},
        {"mobile_fraction", fmt(c.dynamic.mobile_fraction)},
        {"speed_min", fmt(c.dynamic.speed_min)},
        {"speed_max", fmt(c.dynamic.speed_max)},
        {"realizations", std::to_string(c.dynamic.realizations)}}},
  };
}

inline void apply(Config& c, const std::string& section, const std::string& key, const std::string& raw) {
  const std::string f = section + "." + key;
  const std::string v = trim(raw);
  Scenario& s = c.scenario;
  auto& r = s.radio;
  auto& m = s.mac;
  auto& a = s.association;
  auto& e = c.experiment;
  auto& d = c.dynamic;
  const auto num = [&] { return to_double(f, v); };
  const auto integer = [&] { return static_cast<int>(to_int(f, v)); };
  const auto count = [&] { return to_count(f, v); };
  const auto flag = [&] { return to_bool(f, v); };

  if (section == "area") {
    if (key == "width_m") return void(s.area.width_m = num());
    if (key == "height_m") return void(s.area.height_m = num());
  } else if (section == "density") {
    if (key == "eta_n") return void(s.intensities.eta_n = num());
    if (key == "eta_m") return void(s.intensities.eta_m = num());
    if (key == "n_ref") return void(s.intensities.n_ref = num());
    if (key == "fixed_counts") return void(s.placement.fixed_counts = flag());
    if (key == "n_sta") return void(s.placement.n_sta = count());
    if (key == "n_ap") return void(s.placement.n_ap = count());
  } else if (section == "radio") {
    if (key == "tx_power_dbm") return void(r.tx_power_dbm = num());
    if (key == "noise_floor_dbm_per_hz") return void(r.noise_floor_dbm_per_hz = num());
    if (key == "bandwidth_hz") return void(r.bandwidth_hz = num());
    if (key == "pathloss_exponent") return void(r.pathloss_exponent = num());
    if (key == "reference_distance_m") return void(r.reference_distance_m = num());
    if (key == "reference_loss_db") return void(r.reference_loss_db = num());
    if (key == "cca_threshold_dbm") return void(r.cca_threshold_dbm = num());
    if (key == "receiver_sensitivity_dbm") return void(r.receiver_sensitivity_dbm = num());
    if (key == "csr_m") return void(r.csr_m = num());
    if (key == "csr_mode") {
      if (v == "fixed") return void(r.csr_mode = CsrMode::fixed);
      if (v == "cca_derived") return void(r.csr_mode = CsrMode::cca_derived);
      throw ConfigError(f, "expected fixed or cca_derived, got '" + v + "'");
    }
  } else if (section == "phy") {
    if (key == "num_tx") return void(s.num_tx = integer());
    if (key == "num_rx") return void(s.num_rx = integer());
    if (key == "literal_sinr") return void(s.literal_sinr = flag());
  } else if (section == "mac") {
    if (key == "payload_bytes") return void(m.payload_bits = num() / 0.125);
    if (key == "header_bytes") return void(m.header_bits = num() / 0.125);
    if (key == "sifs_us") return void(m.sifs_s = num() / 1e6);
    if (key == "slot_us") return void(m.slot_time_s = num() / 1e6);
    if (key == "difs_us") return void(m.difs_s = num() / 1e6);
    if (key == "ack_us") return void(m.ack_s = num() / 1e6);
    if (key == "cw_min") return void(m.cw_min = integer());
    if (key == "cw_max") return void(m.cw_max = integer());
    if (key == "mcs_order") return void(m.mcs_order = integer());
    if (key == "rts_cts_overhead_us") return void(m.rts_cts_overhead_s = num() / 1e6);
    if (key == "bss_contention") return void(s.bss_contention = flag());
  } else if (section == "association") {
    if (key == "delta") return void(s.fairness.delta = num());
    if (key == "gamma_db") return void(a.sinr_threshold_db = num());
    if (key == "sinr_filter") return void(a.sinr_filter = flag());
    if (key == "weight_iterations") return void(a.weight_iterations = integer());
    if (key == "capacity") {
      if (v == "uncapped") return void(a.capacity = CapacityMode::uncapped);
      if (v == "balanced") return void(a.capacity = CapacityMode::balanced);
      throw ConfigError(f, "expected uncapped or balanced, got '" + v + "'");
    }
    if (key == "shuffle_arrivals") return void(a.shuffle_arrivals = flag());
  } else if (section == "sim") {
    if (key == "slots") return void(c.sim.n_slots = count());
    if (key == "realizations") return void(c.sim.n_realizations = count());
    if (key == "arrival_rate") return void(c.sim.arrival_rate = num());
    if (key == "buffer_limit") return void(c.sim.buffer_limit = count());
    if (key == "retry_limit") return void(c.sim.retry_limit = integer());
    if (key == "decode_threshold_db") return void(c.sim.decode_threshold_db = num());
    if (key == "seed") return void(c.sim.base_seed = to_u64(f, v));
    if (key == "workers") return void(c.sim.workers = static_cast<unsigned>(count()));
  } else if (section == "experiment") {
    if (key == "schemes") {
      e.schemes.clear();
      for (const auto& x : split_list(v)) {
        try {
          e.schemes.push_back(parse_scheme(x));
        } catch (const std::invalid_argument& ex) {
          throw ConfigError(f, ex.what());
        }
      }
      return;
    }
    if (key == "densities") {
      e.densities.clear();
      for (const auto& x : split_list(v)) e.densities.push_back(to_double(f, x));
      return;
    }
    if (key == "sizes") {
      e.sizes.clear();
      for (const auto& x : split_list(v)) e.sizes.push_back(to_count(f, x));
      return;
    }
    if (key == "size_sweep_aps") return void(e.size_sweep_aps = count());
    if (key == "cdf_stas") return void(e.cdf_stas = count());
    if (key == "cdf_aps") return void(e.cdf_aps = count());
    if (key == "out_dir") return void(e.out_dir = v);
  } else if (section == "dynamic") {
    if (key == "initial_stas") return void(d.initial_stas = count());
    if (key == "final_stas") return void(d.final_stas = count());
    if (key == "n_aps") return void(d.n_aps = count());
    if (key == "epochs") return void(d.epochs = count());
    if (key == "epoch_slots") return void(d.epoch_slots = count());
    if (key == "mobile_fraction") return void(d.mobile_fraction = num());
    if (key == "speed_min") return void(d.speed_min = num());
    if (key == "speed_max") return void(d.speed_max = num());
    if (key == "realizations") return void(d.realizations = count());
  } else {
    throw ConfigError(section, "unknown section");
  }
  throw ConfigError(f, "unknown key");
}

}  // namespace detail

/// Range checks with the offending field named.
inline void validate(const Config& c) {
  const auto check = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(field, what);
  };
  const Scenario& s = c.scenario;
  check(s.area.width_m > 0.0, "area.width_m", "must be > 0");
  check(s.area.height_m > 0.0, "area.height_m", "must be > 0");
  check(s.intensities.eta_n >= 0.0, "density.eta_n", "must be >= 0");
  check(s.intensities.eta_m >= 0.0, "density.eta_m", "must be >= 0");
  check(s.intensities.n_ref > 0.0, "density.n_ref", "must be > 0");
  check(s.radio.pathloss_exponent >= 2.0, "radio.pathloss_exponent", "must be >= 2");
  check(s.radio.csr_m > 0.0, "radio.csr_m", "must be > 0");
  check(s.radio.reference_distance_m > 0.0, "radio.reference_distance_m", "must be > 0");
  check(s.radio.bandwidth_hz > 0.0, "radio.bandwidth_hz", "must be > 0");
  check(s.num_tx >= 1, "phy.num_tx", "must be >= 1");
  check(s.num_rx >= s.num_tx, "phy.num_rx", "must be >= phy.num_tx (zero forcing needs K >= U)");
  check(s.mac.payload_bits > 0.0, "mac.payload_bytes", "must be > 0");
  check(s.mac.header_bits >= 0.0, "mac.header_bytes", "must be >= 0");
  check(s.mac.sifs_s > 0.0, "mac.sifs_us", "must be > 0");
  check(s.mac.slot_time_s > 0.0, "mac.slot_us", "must be > 0");
  check(s.mac.difs_s > 0.0, "mac.difs_us", "must be > 0");
  check(s.mac.ack_s > 0.0, "mac.ack_us", "must be > 0");
  check(s.mac.cw_min >= 1, "mac.cw_min", "must be >= 1");
  check(s.mac.cw_max >= s.mac.cw_min, "mac.cw_max", "must be >= mac.cw_min");
  check(s.mac.mcs_order >= 2 && (s.mac.mcs_order & (s.mac.mcs_order - 1)) == 0, "mac.mcs_order",
        "must be a power of two >= 2");
  check(s.mac.rts_cts_overhead_s >= 0.0, "mac.rts_cts_overhead_us", "must be >= 0");
  check(s.fairness.delta >= 0.0, "association.delta", "must be >= 0");
  check(s.association.weight_iterations >= 1, "association.weight_iterations", "must be >= 1");
  check(c.sim.n_slots >= 1, "sim.slots", "must be >= 1");
  check(c.sim.n_realizations >= 1, "sim.realizations", "must be >= 1");
  check(c.sim.arrival_rate >= 0.0, "sim.arrival_rate", "must be >= 0");
  check(c.sim.buffer_limit >= 1, "sim.buffer_limit", "must be >= 1");
  check(c.sim.retry_limit >= 0, "sim.retry_limit", "must be >= 0");
  check(!c.experiment.schemes.empty(), "experiment.schemes", "must list at least one scheme");
  for (double d : c.experiment.densities) check(d >= 0.0, "experiment.densities", "entries must be >= 0");
  check(c.experiment.size_sweep_aps >= 1, "experiment.size_sweep_aps", "must be >= 1");
  check(c.experiment.cdf_aps >= 1, "experiment.cdf_aps", "must be >= 1");
  check(c.dynamic.final_stas >= c.dynamic.initial_stas, "dynamic.final_stas", "must be >= dynamic.initial_stas");
  check(c.dynamic.n_aps >= 1, "dynamic.n_aps", "must be >= 1");
  check(c.dynamic.epochs >= 1, "dynamic.epochs", "must be >= 1");
  check(c.dynamic.epoch_slots >= 1, "dynamic.epoch_slots", "must be >= 1");
  check(c.dynamic.mobile_fraction >= 0.0 && c.dynamic.mobile_fraction <= 1.0, "dynamic.mobile_fraction",
        "must be in [0, 1]");
  check(c.dynamic.speed_min >= 0.0, "dynamic.speed_min", "must be >= 0");
  check(c.dynamic.speed_max >= c.dynamic.speed_min, "dynamic.speed_max", "must be >= dynamic.speed_min");
  check(c.dynamic.realizations >= 1, "dynamic.realizations", "must be >= 1");
}

/// Reads an INI tree. DIFS defaults to SIFS + 2 slots when not given.
inline Config config_from_ptree(const boost::property_tree::ptree& tree) {
  Config c;
  bool difs_given = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError(section, "key outside of any section");
    for (const auto& [key, value] : body) {
      detail::apply(c, section, key, value.data());
      difs_given |= section == "mac" && key == "difs_us";
    }
  }
  if (!difs_given) c.scenario.mac.difs_s = c.scenario.mac.sifs_s + 2.0 * c.scenario.mac.slot_time_s;
  validate(c);
  return c;
}

inline Config parse_ini(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " at line " + std::to_string(e.line()));
  }
  return config_from_ptree(tree);
}

inline std::string to_ini(const Config& c) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [section, keys] : detail::to_table(c)) {
    if (!first) os << "\n";
    first = false;
    os << "[" << section << "]\n";
    for (const auto& [k, v] : keys) os << k << " = " << v << "\n";
  }
  return os.str();
}

/// Manifest: the resolved configuration plus provenance.
inline nlohmann::ordered_json to_manifest(const Config& c, const std::string& build_tag) {
  nlohmann::ordered_json j;
  j["build"] = build_tag;
  j["base_seed"] = c.sim.base_seed;
  nlohmann::ordered_json cfg;
  for (const auto& [section, keys] : detail::to_table(c))
    for (const auto& [k, v] : keys) cfg[section][k] = v;
  j["config"] = cfg;
  return j;
}

inline Config config_from_manifest(const nlohmann::json& j) {
  if (!j.contains("config") || !j["config"].is_object()) throw ConfigError("config", "manifest has no config object");
  boost::property_tree::ptree tree;
  for (const auto& [section, keys] : j["config"].items()) {
    if (!keys.is_object()) throw ConfigError(section, "expected an object of keys");
    boost::property_tree::ptree body;
    for (const auto& [k, v] : keys.items()) body.put(boost::property_tree::ptree::path_type(k, '\0'), v.is_string() ? v.get<std::string>() : v.dump());
    tree.add_child(boost::property_tree::ptree::path_type(section, '\0'), body);
  }
  return config_from_ptree(tree);
}

/// Loads an INI file or, for a .json path, a manifest written by a run.
inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return config_from_manifest(j);
  }
  return parse_ini(buf.str());
}

}  // namespace wlanassoc
