#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <nomajam/detection.hpp>
#include <nomajam/scenario.hpp>

namespace testing {

inline std::string source_path(const std::string& relative) {
  return std::string(NOMAJAM_SOURCE_DIR) + "/" + relative;
}

/// |a - b| <= rel * max(|a|, |b|), or both within `abs_floor` of each other.
inline bool close(double a, double b, double rel, double abs_floor = 0.0) {
  if (a == b) return true;
  const double diff = std::abs(a - b);
  return diff <= abs_floor || diff <= rel * std::max(std::abs(a), std::abs(b));
}

/// The reference cluster with the threshold taken from the independent oracle
/// instead of this library's calibration, so metric comparisons do not hide
/// calibration errors.
inline nomajam::Scenario reference(double threshold_w) {
  nomajam::Scenario s = nomajam::reference_scenario();
  s.jammer.trigger_threshold_w = threshold_w;
  return s;
}

/// Random but valid scenarios for property tests. Spans geometry, powers,
/// code and jammer settings well beyond the reference cluster.
class ScenarioSampler {
 public:
  explicit ScenarioSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  nomajam::Scenario next() {
    using namespace nomajam;
    Scenario s = reference_scenario();
    const int ues = integer(1, 3);
    s.ues.clear();
    double d = uniform(5.0, 40.0);
    for (int m = 0; m < ues; ++m) {
      s.ues.push_back(UeConfig{d, uniform(10.0, 120.0), uniform(0.0, 120.0)});
      d += uniform(0.0, 40.0);
    }
    s.tx.noma_powers_w.clear();
    double p = log_uniform(1e-4, 5e-2);
    for (int m = 0; m < ues; ++m) {
      s.tx.noma_powers_w.push_back(p);
      p *= log_uniform(1.0, 30.0);
    }
    double total = 0.0;
    for (const double w : s.tx.noma_powers_w) total += w;
    s.tx.max_total_power_w = std::max(10.0, total);
    s.tx.blocklength = integer(20, 400);
    s.tx.payload_bits = integer(16, 512);
    s.tx.num_transmissions = integer(1, 5);
    s.jammer.tx_power_w = log_uniform(1e-4, 1.0);
    s.jammer.num_samples = integer(1, 500);
    s.jammer.distance_gnb_m = uniform(5.0, 100.0);
    s.jammer.trigger_threshold_w = noise_power_w(s.radio) * log_uniform(1.01, 1e11);
    s.jammer.calibration.reset();
    s.tx.dispersion = integer(0, 1) ? DispersionModel::AsPrinted : DispersionModel::Standard;
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing
