#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nomajam/fbl.hpp"
#include "nomajam/ga_settings.hpp"

namespace nomajam {

struct RadioConstants {
  double bandwidth_hz = 720e3;
  double noise_density_dbm_per_hz = -174.0;
  double pathloss_exponent = 2.5;
  double header_duration_s = 1e-3;
};

struct UeConfig {
  double distance_gnb_m = 0.0;
  double distance_jammer_m = 0.0;
  double arrival_rate_pps = 50.0;
};

enum class JammerMode { None, Barrage, Reactive };

/// Where the detection threshold is pinned when it is calibrated rather than
/// given: P_d^Ray(at_total_power_w) = target_detection_prob.
struct ThresholdCalibration {
  double target_detection_prob = 0.1;
  std::optional<double> at_total_power_w;  // unset: half of P_max
};

struct JammerConfig {
  JammerMode mode = JammerMode::Reactive;
  double tx_power_w = 20e-3;
  double trigger_threshold_w = 0.0;
  double distance_gnb_m = 30.0;
  int num_samples = 100;
  /// Set when the threshold was (or is to be) obtained by calibration.
  std::optional<ThresholdCalibration> calibration;
};

struct TransmissionConfig {
  int blocklength = 80;
  int payload_bits = 256;
  int num_transmissions = 1;
  std::vector<double> noma_powers_w;  // SIC order, nondecreasing
  double max_total_power_w = 100e-3;
  DispersionModel dispersion = DispersionModel::AsPrinted;

  double total_power_w() const;
  CodeSpec code() const { return {blocklength, payload_bits}; }
};

struct UrllcTargets {
  double reliability_floor = 0.99999;
  double delay_ceiling_s = 5e-3;
};

/// Complete experiment description. Immutable once loaded and validated.
struct Scenario {
  RadioConstants radio;
  std::vector<UeConfig> ues;  // ascending distance to the gNB
  JammerConfig jammer;
  TransmissionConfig tx;
  UrllcTargets urllc;
  GaSettings ga;

  std::size_t cluster_size() const { return ues.size(); }
};

constexpr double mw_to_w(double mw) { return mw / 1000.0; }
constexpr double w_to_mw(double w) { return w * 1000.0; }

/// sigma^2 = B * N0, in watts.
double noise_power_w(const RadioConstants& radio);

/// T_f = T_h + n_b / B.
double frame_duration_s(const RadioConstants& radio, int blocklength);

/// Throws ConfigError naming the first violated invariant.
void validate(const Scenario& scenario);

/// Two-UE reference cluster (the contents of scenarios/reference.yaml) with
/// lambda = 50/s, N = 100 and the threshold calibrated.
Scenario reference_scenario();

/// Fills jammer.trigger_threshold_w from jammer.calibration when present.
void calibrate_scenario_threshold(Scenario& scenario);

/// Parses scenario text, applies `key.path=value` overrides, validates, and
/// runs threshold calibration if requested. `source` labels error messages.
Scenario parse_scenario(std::string_view text, std::span<const std::string> overrides = {},
                        std::string_view source = "<scenario>");

Scenario load_scenario(const std::filesystem::path& path,
                       std::span<const std::string> overrides = {});

/// Scenario text accepted by parse_scenario. The threshold is written as a
/// number so a reload reproduces it exactly.
std::string serialize_scenario(const Scenario& scenario);

std::string_view to_string(JammerMode mode);
std::string_view to_string(DispersionModel model);

}  // namespace nomajam
