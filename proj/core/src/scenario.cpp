#include "nomajam/scenario.hpp"

#include <algorithm>

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "nomajam/detection.hpp"
#include "nomajam/errors.hpp"

namespace nomajam {
namespace {

constexpr int kBitsPerByte = 8;

std::string where(const YAML::Node& node, std::string_view source) {
  std::ostringstream out;
  out << source;
  const YAML::Mark mark = node.Mark();
  if (!mark.is_null()) out << ":" << (mark.line + 1);
  return out.str();
}

[[noreturn]] void fail(const YAML::Node& node, std::string_view source, const std::string& msg) {
  throw ConfigError(where(node, source) + ": " + msg);
}

// Splits "d_g_12" into ("d_g_", 12). Returns 0 when there is no positive index.
std::size_t trailing_index(std::string_view key, std::string_view prefix) {
  if (key.size() <= prefix.size() || key.substr(0, prefix.size()) != prefix) return 0;
  const std::string_view digits = key.substr(prefix.size());
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.front() == '0') return 0;
  return value;
}

class Section {
 public:
  Section(const YAML::Node& root, std::string name, std::string_view source, bool required)
      : name_(std::move(name)), source_(source), node_(root[name_]) {
    if (!node_) {
      if (required) fail(root, source_, "missing required section '" + name_ + "'");
      return;
    }
    if (!node_.IsMap()) fail(node_, source_, "section '" + name_ + "' must be a mapping");
  }

  bool present() const { return static_cast<bool>(node_); }
  bool has(const std::string& key) const { return present() && node_[key]; }

  template <typename T>
  T get(const std::string& key) {
    if (!has(key)) fail(node_, source_, "missing required key '" + name_ + "." + key + "'");
    return convert<T>(key);
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? convert<T>(key) : fallback;
  }

  std::string scalar(const std::string& key) { return get<std::string>(key); }

  /// Rejects keys that were never read: typos must not silently change physics.
  void reject_unknown() const {
    if (!present()) return;
    for (const auto& item : node_) {
      const auto key = item.first.as<std::string>();
      if (!consumed_.contains(key))
        fail(item.first, source_, "unknown key '" + name_ + "." + key + "'");
    }
  }

  const YAML::Node& node() const { return node_; }

 private:
  template <typename T>
  T convert(const std::string& key) {
    consumed_.insert(key);
    const YAML::Node value = node_[key];
    try {
      return value.as<T>();
    } catch (const YAML::Exception&) {
      fail(value, source_, "key '" + name_ + "." + key + "' has an invalid value");
    }
  }

  std::string name_;
  std::string_view source_;
  YAML::Node node_;
  std::set<std::string> consumed_;
};

JammerMode parse_mode(const std::string& text) {
  if (text == "None") return JammerMode::None;
  if (text == "Barrage") return JammerMode::Barrage;
  if (text == "Reactive") return JammerMode::Reactive;
  throw ConfigError("jammer.mode must be one of None, Barrage, Reactive (got '" + text + "')");
}

DispersionModel parse_dispersion(const std::string& text) {
  if (text == "as_printed") return DispersionModel::AsPrinted;
  if (text == "standard") return DispersionModel::Standard;
  throw ConfigError("transmission.dispersion must be as_printed or standard (got '" + text + "')");
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  const auto dot = path.find('.');
  if (dot == std::string::npos || path.find('.', dot + 1) != std::string::npos)
    throw ConfigError("override key '" + path + "' must be section.key");
  const std::string section = path.substr(0, dot);
  const std::string key = path.substr(dot + 1);
  static const std::set<std::string> kSections = {"radio", "cluster", "jammer",
                                                  "transmission", "urllc", "ga"};
  if (!kSections.contains(section)) throw ConfigError("unknown key '" + path + "'");
  if (!root[section]) root[section] = YAML::Node(YAML::NodeType::Map);
  root[section][key] = value;
}

Scenario from_yaml(const YAML::Node& root, std::string_view source) {
  if (!root.IsMap()) throw ConfigError(std::string(source) + ": scenario must be a mapping");
  static const std::set<std::string> kSections = {"radio", "cluster", "jammer",
                                                  "transmission", "urllc", "ga"};
  for (const auto& item : root) {
    const auto name = item.first.as<std::string>();
    if (!kSections.contains(name)) fail(item.first, source, "unknown section '" + name + "'");
  }

  Scenario s;

  Section radio(root, "radio", source, true);
  s.radio.bandwidth_hz = radio.get<double>("B");
  s.radio.noise_density_dbm_per_hz = radio.get<double>("N_0");
  s.radio.pathloss_exponent = radio.get<double>("nu");
  s.radio.header_duration_s = radio.get<double>("T_h");
  radio.reject_unknown();

  Section cluster(root, "cluster", source, true);
  std::size_t count = 0;
  for (const auto& item : cluster.node()) {
    count = std::max(count, trailing_index(item.first.as<std::string>(), "d_g_"));
  }
  if (count == 0) fail(cluster.node(), source, "cluster must define d_g_1 ... d_g_<N_c>");
  if (cluster.has("N_c")) {
    const auto declared = cluster.get<std::size_t>("N_c");
    if (declared != count)
      fail(cluster.node(), source,
           "N_c = " + std::to_string(declared) + " but " + std::to_string(count) +
               " UE distances are given");
  }
  const double shared_rate = cluster.get_or<double>("lambda", 50.0);
  for (std::size_t m = 1; m <= count; ++m) {
    const std::string idx = std::to_string(m);
    UeConfig ue;
    ue.distance_gnb_m = cluster.get<double>("d_g_" + idx);
    ue.distance_jammer_m = cluster.get<double>("d_J_" + idx);
    ue.arrival_rate_pps = cluster.get_or<double>("lambda_" + idx, shared_rate);
    s.ues.push_back(ue);
  }
  cluster.reject_unknown();

  Section jammer(root, "jammer", source, true);
  s.jammer.mode = parse_mode(jammer.scalar("mode"));
  s.jammer.tx_power_w = mw_to_w(jammer.get<double>("P_J"));
  s.jammer.distance_gnb_m = jammer.get<double>("d_g_J");
  s.jammer.num_samples = jammer.get_or<int>("N", 100);
  const std::string threshold = jammer.get_or<std::string>("P_th", "auto");
  ThresholdCalibration calibration;
  calibration.target_detection_prob =
      jammer.get_or<double>("calibration_P_d", calibration.target_detection_prob);
  if (jammer.has("calibration_P_t"))
    calibration.at_total_power_w = mw_to_w(jammer.get<double>("calibration_P_t"));
  if (threshold == "auto") {
    s.jammer.calibration = calibration;
  } else {
    try {
      s.jammer.trigger_threshold_w = std::stod(threshold);
    } catch (const std::exception&) {
      fail(jammer.node()["P_th"], source, "jammer.P_th must be a number (watts) or 'auto'");
    }
    if (jammer.has("calibration_P_d") || jammer.has("calibration_P_t")) s.jammer.calibration = calibration;
  }
  jammer.reject_unknown();

  Section tx(root, "transmission", source, true);
  s.tx.blocklength = tx.get<int>("n_b");
  if (tx.has("n_d") == tx.has("n_d_bits"))
    fail(tx.node(), source, "give exactly one of transmission.n_d (bytes) or transmission.n_d_bits");
  s.tx.payload_bits = tx.has("n_d") ? tx.get<int>("n_d") * kBitsPerByte : tx.get<int>("n_d_bits");
  s.tx.num_transmissions = tx.get<int>("L");
  for (std::size_t m = 1; m <= count; ++m) {
    s.tx.noma_powers_w.push_back(mw_to_w(tx.get<double>("P_" + std::to_string(m))));
  }
  s.tx.max_total_power_w = mw_to_w(tx.get<double>("P_max"));
  s.tx.dispersion = parse_dispersion(tx.get_or<std::string>("dispersion", "as_printed"));
  tx.reject_unknown();

  Section urllc(root, "urllc", source, true);
  s.urllc.reliability_floor = urllc.get<double>("delta_r");
  s.urllc.delay_ceiling_s = urllc.get<double>("delta_d");
  urllc.reject_unknown();

  Section ga(root, "ga", source, false);
  GaSettings& g = s.ga;
  g.population_size = ga.get_or("population_size", g.population_size);
  g.max_generations = ga.get_or("max_generations", g.max_generations);
  g.function_tolerance = ga.get_or("function_tolerance", g.function_tolerance);
  g.constraint_tolerance = ga.get_or("constraint_tolerance", g.constraint_tolerance);
  g.crossover_fraction = ga.get_or("crossover_fraction", g.crossover_fraction);
  g.max_stall_generations = ga.get_or("max_stall_generations", g.max_stall_generations);
  g.rng_seed = ga.get_or("seed", g.rng_seed);
  g.elite_count = ga.get_or("elite_count", g.elite_count);
  g.tournament_size = ga.get_or("tournament_size", g.tournament_size);
  g.mutation_scale = ga.get_or("mutation_scale", g.mutation_scale);
  g.islands = ga.get_or("islands", g.islands);
  g.migration_interval = ga.get_or("migration_interval", g.migration_interval);
  g.power_range_db = ga.get_or("power_range_db", g.power_range_db);
  g.max_transmissions = ga.get_or("max_L", g.max_transmissions);
  g.min_blocklength = ga.get_or("min_n_b", g.min_blocklength);
  g.max_blocklength = ga.get_or("max_n_b", g.max_blocklength);
  g.threads = ga.get_or("threads", g.threads);
  ga.reject_unknown();

  return s;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

double TransmissionConfig::total_power_w() const {
  return std::accumulate(noma_powers_w.begin(), noma_powers_w.end(), 0.0);
}

double noise_power_w(const RadioConstants& radio) {
  // dBm -> W: 10^(dBm/10) mW.
  return radio.bandwidth_hz * std::pow(10.0, radio.noise_density_dbm_per_hz / 10.0) * 1e-3;
}

double frame_duration_s(const RadioConstants& radio, int blocklength) {
  if (blocklength < 1) throw PreconditionError("frame_duration_s: n_b must be >= 1");
  return radio.header_duration_s + static_cast<double>(blocklength) / radio.bandwidth_hz;
}

void validate(const Scenario& s) {
  require(s.radio.bandwidth_hz > 0.0, "bandwidth B must be > 0");
  require(std::isfinite(s.radio.noise_density_dbm_per_hz), "noise density N_0 must be finite");
  require(s.radio.pathloss_exponent > 0.0, "path-loss exponent nu must be > 0");
  require(s.radio.header_duration_s >= 0.0, "header duration T_h must be >= 0");

  require(!s.ues.empty(), "cluster must contain at least one UE");
  for (std::size_t m = 0; m < s.ues.size(); ++m) {
    const std::string ue = "UE " + std::to_string(m + 1);
    require(s.ues[m].distance_gnb_m > 0.0, ue + ": gNB distance must be > 0");
    require(s.ues[m].distance_jammer_m > 0.0, ue + ": jammer distance must be > 0");
    require(s.ues[m].arrival_rate_pps >= 0.0, ue + ": arrival rate lambda must be >= 0");
    if (m > 0)
      require(s.ues[m - 1].distance_gnb_m <= s.ues[m].distance_gnb_m,
              "UEs must be ordered by ascending gNB distance");
  }

  require(s.jammer.tx_power_w >= 0.0, "jammer power P_J must be >= 0");
  require(s.jammer.num_samples >= 1, "jammer sample count N must be >= 1");
  require(s.jammer.distance_gnb_m > 0.0, "gNB-jammer distance d_g_J must be > 0");
  if (s.jammer.calibration) {
    const double target = s.jammer.calibration->target_detection_prob;
    require(target > 0.0 && target < 1.0, "calibration_P_d must lie in (0, 1)");
  }

  require(s.tx.blocklength >= 1, "blocklength n_b must be >= 1");
  require(s.tx.payload_bits >= 1, "payload n_d must be >= 1 bit");
  require(s.tx.num_transmissions >= 1, "transmission count L must be >= 1");
  require(s.tx.noma_powers_w.size() == s.ues.size(), "one NOMA power per UE is required");
  require(s.tx.max_total_power_w > 0.0, "P_max must be > 0");
  for (std::size_t m = 0; m < s.tx.noma_powers_w.size(); ++m) {
    require(s.tx.noma_powers_w[m] >= 0.0, "NOMA powers must be >= 0");
    if (m > 0)
      require(s.tx.noma_powers_w[m - 1] <= s.tx.noma_powers_w[m],
              "SIC order violated: P_" + std::to_string(m) + " > P_" + std::to_string(m + 1));
  }
  // A few ulps of slack so a budget written as exact decimals is not rejected
  // because the mW -> W conversion rounded.
  require(s.tx.total_power_w() <= s.tx.max_total_power_w * (1.0 + 1e-12),
          "power budget exceeded: sum of P_m > P_max");

  require(s.urllc.reliability_floor > 0.0 && s.urllc.reliability_floor < 1.0,
          "reliability floor delta_r must lie in (0, 1)");
  require(s.urllc.delay_ceiling_s > 0.0, "delay ceiling delta_d must be > 0");

  const GaSettings& g = s.ga;
  require(g.population_size >= 2, "ga.population_size must be >= 2");
  require(g.max_generations >= 1, "ga.max_generations must be >= 1");
  require(g.function_tolerance > 0.0 && g.constraint_tolerance > 0.0, "ga tolerances must be > 0");
  require(g.crossover_fraction >= 0.0 && g.crossover_fraction <= 1.0,
          "ga.crossover_fraction must lie in [0, 1]");
  require(g.max_stall_generations >= 1, "ga.max_stall_generations must be >= 1");
  require(g.elite_count >= 0 && g.elite_count < g.population_size,
          "ga.elite_count must lie in [0, population_size)");
  require(g.tournament_size >= 1, "ga.tournament_size must be >= 1");
  require(g.mutation_scale >= 0.0, "ga.mutation_scale must be >= 0");
  require(g.islands >= 1, "ga.islands must be >= 1");
  require(g.migration_interval >= 0, "ga.migration_interval must be >= 0 (0 disables migration)");
  require(g.power_range_db > 0.0, "ga.power_range_db must be > 0");
  require(g.max_transmissions >= 1, "ga.max_L must be >= 1");
  require(g.min_blocklength >= 1 && g.min_blocklength <= g.max_blocklength,
          "ga n_b search box must satisfy 1 <= min_n_b <= max_n_b");
}

void calibrate_scenario_threshold(Scenario& s) {
  if (!s.jammer.calibration) return;
  const ThresholdCalibration& cal = *s.jammer.calibration;
  const double at_power = cal.at_total_power_w.value_or(0.5 * s.tx.max_total_power_w);
  s.jammer.trigger_threshold_w =
      calibrate_threshold(cal.target_detection_prob, at_power, detection_inputs(s, at_power));
}

Scenario reference_scenario() {
  Scenario s;
  s.ues = {UeConfig{10.0, 27.3, 50.0}, UeConfig{50.0, 77.0, 50.0}};
  s.tx.noma_powers_w = {mw_to_w(10.0), mw_to_w(60.0)};
  s.jammer.calibration = ThresholdCalibration{0.1, mw_to_w(50.0)};
  calibrate_scenario_threshold(s);
  validate(s);
  return s;
}

Scenario parse_scenario(std::string_view text, std::span<const std::string> overrides,
                        std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    std::ostringstream msg;
    msg << source << ":" << (e.mark.line + 1) << ":" << (e.mark.column + 1) << ": " << e.msg;
    throw ConfigError(msg.str());
  }
  for (const auto& assignment : overrides) apply_override(root, assignment);

  Scenario s = from_yaml(root, source);
  const auto in_source = [&](const std::exception& e) { return ConfigError(std::string(source) + ": " + e.what()); };
  try {
    if (s.jammer.calibration && s.jammer.trigger_threshold_w == 0.0) {
      s.jammer.trigger_threshold_w = 1.0;  // placeholder until calibrated
      validate(s);
      calibrate_scenario_threshold(s);
    }
    require(s.jammer.trigger_threshold_w > 0.0, "jammer threshold P_th must be > 0");
    validate(s);
  } catch (const ConfigError& e) {
    throw in_source(e);
  } catch (const BracketError& e) {
    throw in_source(e);
  } catch (const PreconditionError& e) {
    throw in_source(e);
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), overrides, path.string());
}

std::string serialize_scenario(const Scenario& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "radio" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "B" << YAML::Value << s.radio.bandwidth_hz;
  out << YAML::Key << "N_0" << YAML::Value << s.radio.noise_density_dbm_per_hz;
  out << YAML::Key << "nu" << YAML::Value << s.radio.pathloss_exponent;
  out << YAML::Key << "T_h" << YAML::Value << s.radio.header_duration_s;
  out << YAML::EndMap;

  out << YAML::Key << "cluster" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "N_c" << YAML::Value << s.ues.size();
  const bool shared_rate = std::all_of(s.ues.begin(), s.ues.end(), [&](const UeConfig& ue) {
    return ue.arrival_rate_pps == s.ues.front().arrival_rate_pps;
  });
  if (shared_rate) out << YAML::Key << "lambda" << YAML::Value << s.ues.front().arrival_rate_pps;
  for (std::size_t m = 0; m < s.ues.size(); ++m) {
    const std::string idx = std::to_string(m + 1);
    out << YAML::Key << "d_g_" + idx << YAML::Value << s.ues[m].distance_gnb_m;
    out << YAML::Key << "d_J_" + idx << YAML::Value << s.ues[m].distance_jammer_m;
    if (!shared_rate) out << YAML::Key << "lambda_" + idx << YAML::Value << s.ues[m].arrival_rate_pps;
  }
  out << YAML::EndMap;

  out << YAML::Key << "jammer" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << std::string(to_string(s.jammer.mode));
  out << YAML::Key << "P_J" << YAML::Value << w_to_mw(s.jammer.tx_power_w);
  out << YAML::Key << "d_g_J" << YAML::Value << s.jammer.distance_gnb_m;
  out << YAML::Key << "N" << YAML::Value << s.jammer.num_samples;
  out << YAML::Key << "P_th" << YAML::Value << s.jammer.trigger_threshold_w;
  if (s.jammer.calibration) {
    out << YAML::Key << "calibration_P_d" << YAML::Value
        << s.jammer.calibration->target_detection_prob;
    if (s.jammer.calibration->at_total_power_w)
      out << YAML::Key << "calibration_P_t" << YAML::Value
          << w_to_mw(*s.jammer.calibration->at_total_power_w);
  }
  out << YAML::EndMap;

  out << YAML::Key << "transmission" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_b" << YAML::Value << s.tx.blocklength;
  if (s.tx.payload_bits % kBitsPerByte == 0)
    out << YAML::Key << "n_d" << YAML::Value << s.tx.payload_bits / kBitsPerByte;
  else
    out << YAML::Key << "n_d_bits" << YAML::Value << s.tx.payload_bits;
  out << YAML::Key << "L" << YAML::Value << s.tx.num_transmissions;
  for (std::size_t m = 0; m < s.tx.noma_powers_w.size(); ++m)
    out << YAML::Key << "P_" + std::to_string(m + 1) << YAML::Value
        << w_to_mw(s.tx.noma_powers_w[m]);
  out << YAML::Key << "P_max" << YAML::Value << w_to_mw(s.tx.max_total_power_w);
  out << YAML::Key << "dispersion" << YAML::Value << std::string(to_string(s.tx.dispersion));
  out << YAML::EndMap;

  out << YAML::Key << "urllc" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "delta_r" << YAML::Value << s.urllc.reliability_floor;
  out << YAML::Key << "delta_d" << YAML::Value << s.urllc.delay_ceiling_s;
  out << YAML::EndMap;

  const GaSettings& g = s.ga;
  out << YAML::Key << "ga" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "population_size" << YAML::Value << g.population_size;
  out << YAML::Key << "max_generations" << YAML::Value << g.max_generations;
  out << YAML::Key << "function_tolerance" << YAML::Value << g.function_tolerance;
  out << YAML::Key << "constraint_tolerance" << YAML::Value << g.constraint_tolerance;
  out << YAML::Key << "crossover_fraction" << YAML::Value << g.crossover_fraction;
  out << YAML::Key << "max_stall_generations" << YAML::Value << g.max_stall_generations;
  out << YAML::Key << "seed" << YAML::Value << g.rng_seed;
  out << YAML::Key << "elite_count" << YAML::Value << g.elite_count;
  out << YAML::Key << "tournament_size" << YAML::Value << g.tournament_size;
  out << YAML::Key << "mutation_scale" << YAML::Value << g.mutation_scale;
  out << YAML::Key << "islands" << YAML::Value << g.islands;
  out << YAML::Key << "migration_interval" << YAML::Value << g.migration_interval;
  out << YAML::Key << "power_range_db" << YAML::Value << g.power_range_db;
  out << YAML::Key << "max_L" << YAML::Value << g.max_transmissions;
  out << YAML::Key << "min_n_b" << YAML::Value << g.min_blocklength;
  out << YAML::Key << "max_n_b" << YAML::Value << g.max_blocklength;
  out << YAML::Key << "threads" << YAML::Value << g.threads;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string_view to_string(JammerMode mode) {
  switch (mode) {
    case JammerMode::None:
      return "None";
    case JammerMode::Barrage:
      return "Barrage";
    case JammerMode::Reactive:
      return "Reactive";
  }
  return "?";
}

std::string_view to_string(DispersionModel model) {
  return model == DispersionModel::AsPrinted ? "as_printed" : "standard";
}

}  // namespace nomajam
