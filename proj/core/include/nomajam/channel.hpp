#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nomajam/rng.hpp"

namespace nomajam {

/// Power gain of one link. Analytic metrics use the mean; the Monte Carlo
/// oracle fills in a Rayleigh draw.
struct LinkGain {
  double mean_gain = 1.0;
  std::optional<double> sampled_gain;

  double value() const { return sampled_gain.value_or(mean_gain); }
};

/// E|h|^2 = d^(-nu).
double mean_gain(double distance_m, double pathloss_exponent);

/// |h|^2 ~ Exponential(mean d^(-nu)) drawn from the caller's stream.
double sample_gain(double distance_m, double pathloss_exponent, Rng& rng);

LinkGain make_link_gain(double distance_m, double pathloss_exponent);

/// SIC-chain SINRs seen at UE `ue` (zero-based): entry k is the SINR of
/// UE (ue + k)'s signal, with the not-yet-cancelled lower-index powers as
/// interference. `powers_w` must be nondecreasing.
std::vector<double> sinr_chain(double gain, std::span<const double> powers_w, double noise_w,
                               std::size_t ue);

/// As sinr_chain, with jam_gain * jammer_power_w added to every denominator.
std::vector<double> sinjr_chain(double gain, double jam_gain, std::span<const double> powers_w,
                                double jammer_power_w, double noise_w, std::size_t ue);

}  // namespace nomajam
