#include "wcs/config.hpp"

#include <fstream>
#include <set>
#include <vector>

namespace wcs {

namespace {

using nlohmann::json;

/// Tracks which keys of an object were consumed and rejects leftovers.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path)
      : obj_(obj), path_(std::move(path)) {
    if (!obj.is_object()) {
      throw ConfigError("config: '" + path_ + "' must be an object");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: key '" + full(key) + "' has the wrong type");
    }
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) {
        throw ConfigError("config: unknown key '" + full(key) + "'");
      }
    }
  }

  std::string full(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

McsTable mcs_table_from_json(const json& arr) {
  if (!arr.is_array() || arr.empty()) {
    throw ConfigError("config: 'mcs_table' must be a nonempty array");
  }
  std::vector<McsEntry> entries;
  for (size_t i = 0; i < arr.size(); ++i) {
    ObjectReader row(arr[i], "mcs_table[" + std::to_string(i) + "]");
    McsEntry e;
    row.read("index", e.index);
    row.read("spectral_efficiency", e.spectral_efficiency);
    row.read("snr_threshold_db", e.snr_threshold_db);
    row.read("waterfall_slope", e.waterfall_slope);
    row.finish();
    entries.push_back(e);
  }
  return McsTable(std::move(entries));  // may throw McsTableError
}

}  // namespace

SimConfig config_from_json(const json& doc) {
  SimConfig cfg;
  ObjectReader top(doc, "");

  top.read("devices", cfg.devices);
  top.read("cell_radius_m", cfg.cell_radius_m);
  top.read("duration_s", cfg.duration_s);
  top.read("cycle_period_s", cfg.cycle_period_s);
  if (top.has("scheduler")) {
    std::string name;
    top.read("scheduler", name);
    try {
      cfg.policy = policy_from_string(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: key 'scheduler': ") + e.what());
    }
  }
  top.read("seed", cfg.seed);
  top.read("trials", cfg.trials);
  top.read("rho_prbs_per_block", cfg.rho_prbs_per_block);
  top.read("payload_bytes", cfg.payload_bytes);

  if (top.has("numerology")) {
    ObjectReader num(top.at("numerology"), "numerology");
    double scs = cfg.numerology.scs_hz;
    int symbols = cfg.numerology.symbols_per_slot;
    int overhead = cfg.numerology.overhead_symbols;
    num.read("scs_hz", scs);
    num.read("symbols_per_slot", symbols);
    num.read("overhead_symbols", overhead);
    num.finish();
    try {
      cfg.numerology = Numerology::from_scs(scs, symbols, overhead);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: key 'numerology': ") + e.what());
    }
  }

  if (top.has("frame")) {
    ObjectReader fr(top.at("frame"), "frame");
    fr.read("channel_bandwidth_hz", cfg.frame.channel_bandwidth_hz);
    fr.read("total_prbs", cfg.frame.total_prbs);
    fr.read("ll_subframes_per_frame", cfg.frame.ll_subframes_per_frame);
    fr.read("frame_duration_s", cfg.frame.frame_duration_s);
    fr.finish();
  }
  cfg.frame.cycle_period_s = cfg.cycle_period_s;

  if (top.has("channel")) {
    ObjectReader ch(top.at("channel"), "channel");
    ch.read("path_loss_exponent", cfg.channel.path_loss_exponent);
    ch.read("reference_loss_db", cfg.channel.reference_loss_db);
    ch.read("tx_power_dbm", cfg.channel.tx_power_dbm);
    ch.read("noise_density_dbm_hz", cfg.channel.noise_density_dbm_hz);
    ch.read("rayleigh_fading", cfg.channel.rayleigh_fading);
    ch.finish();
  }

  if (top.has("mcs_table")) {
    cfg.mcs_table = mcs_table_from_json(top.at("mcs_table"));
  }

  if (top.has("pendulum")) {
    ObjectReader pe(top.at("pendulum"), "pendulum");
    pe.read("cart_mass_kg", cfg.pendulum.cart_mass_kg);
    pe.read("pole_mass_kg", cfg.pendulum.pole_mass_kg);
    pe.read("pole_length_m", cfg.pendulum.pole_length_m);
    pe.read("gravity", cfg.pendulum.gravity);
    pe.read("sample_period_s", cfg.pendulum.sample_period_s);
    pe.finish();
  }

  if (top.has("lqr")) {
    ObjectReader lq(top.at("lqr"), "lqr");
    if (lq.has("state_weights")) {
      std::vector<double> w;
      lq.read("state_weights", w);
      if (w.size() != 4) {
        throw ConfigError(
            "config: key 'lqr.state_weights' must hold 4 values");
      }
      for (int i = 0; i < 4; ++i) cfg.lqr_state_weights(i) = w[i];
    }
    lq.read("input_weight", cfg.lqr_input_weight);
    lq.finish();
  }

  top.read("process_noise_variance", cfg.process_noise_variance);
  top.read("init_angle_std_rad", cfg.init_angle_std_rad);
  top.read("fallen_angle_rad", cfg.fallen_angle_rad);
  top.read("counter_cap", cfg.counter_cap);
  top.finish();

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open file '" + path + "'");
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config: failed to parse '" + path + "': " + e.what());
  }
  return config_from_json(doc);
}

nlohmann::json config_to_json(const SimConfig& cfg) {
  json doc;
  doc["devices"] = cfg.devices;
  doc["cell_radius_m"] = cfg.cell_radius_m;
  doc["duration_s"] = cfg.duration_s;
  doc["cycle_period_s"] = cfg.cycle_period_s;
  doc["scheduler"] = to_string(cfg.policy);
  doc["seed"] = cfg.seed;
  doc["trials"] = cfg.trials;
  doc["rho_prbs_per_block"] = cfg.rho_prbs_per_block;
  doc["payload_bytes"] = cfg.payload_bytes;
  doc["numerology"] = {{"scs_hz", cfg.numerology.scs_hz},
                       {"symbols_per_slot", cfg.numerology.symbols_per_slot},
                       {"overhead_symbols", cfg.numerology.overhead_symbols}};
  doc["frame"] = {
      {"channel_bandwidth_hz", cfg.frame.channel_bandwidth_hz},
      {"total_prbs", cfg.frame.total_prbs},
      {"ll_subframes_per_frame", cfg.frame.ll_subframes_per_frame},
      {"frame_duration_s", cfg.frame.frame_duration_s}};
  doc["channel"] = {
      {"path_loss_exponent", cfg.channel.path_loss_exponent},
      {"reference_loss_db", cfg.channel.reference_loss_db},
      {"tx_power_dbm", cfg.channel.tx_power_dbm},
      {"noise_density_dbm_hz", cfg.channel.noise_density_dbm_hz},
      {"rayleigh_fading", cfg.channel.rayleigh_fading}};
  json table = json::array();
  for (const McsEntry& e : cfg.mcs_table.entries()) {
    table.push_back({{"index", e.index},
                     {"spectral_efficiency", e.spectral_efficiency},
                     {"snr_threshold_db", e.snr_threshold_db},
                     {"waterfall_slope", e.waterfall_slope}});
  }
  doc["mcs_table"] = table;
  doc["pendulum"] = {{"cart_mass_kg", cfg.pendulum.cart_mass_kg},
                     {"pole_mass_kg", cfg.pendulum.pole_mass_kg},
                     {"pole_length_m", cfg.pendulum.pole_length_m},
                     {"gravity", cfg.pendulum.gravity},
                     {"sample_period_s", cfg.pendulum.sample_period_s}};
  doc["lqr"] = {{"state_weights",
                 std::vector<double>{cfg.lqr_state_weights(0),
                                     cfg.lqr_state_weights(1),
                                     cfg.lqr_state_weights(2),
                                     cfg.lqr_state_weights(3)}},
                {"input_weight", cfg.lqr_input_weight}};
  doc["process_noise_variance"] = cfg.process_noise_variance;
  doc["init_angle_std_rad"] = cfg.init_angle_std_rad;
  doc["fallen_angle_rad"] = cfg.fallen_angle_rad;
  doc["counter_cap"] = cfg.counter_cap;
  return doc;
}

}  // namespace wcs
