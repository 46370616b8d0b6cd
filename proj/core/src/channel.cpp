#include "nomajam/channel.hpp"

#include <cmath>
#include <random>

#include "nomajam/errors.hpp"

namespace nomajam {

double mean_gain(double distance_m, double pathloss_exponent) {
  if (!(distance_m > 0.0)) throw PreconditionError("link distance must be > 0");
  return std::pow(distance_m, -pathloss_exponent);
}

double sample_gain(double distance_m, double pathloss_exponent, Rng& rng) {
  const double mean = mean_gain(distance_m, pathloss_exponent);
  return std::exponential_distribution<double>(1.0 / mean)(rng);
}

LinkGain make_link_gain(double distance_m, double pathloss_exponent) {
  return LinkGain{mean_gain(distance_m, pathloss_exponent), std::nullopt};
}

std::vector<double> sinjr_chain(double gain, double jam_gain, std::span<const double> powers_w,
                                double jammer_power_w, double noise_w, std::size_t ue) {
  if (ue >= powers_w.size()) throw PreconditionError("UE index outside the NOMA cluster");
  if (!(noise_w > 0.0)) throw PreconditionError("noise power must be > 0");
  if (gain < 0.0 || jam_gain < 0.0 || jammer_power_w < 0.0)
    throw PreconditionError("gains and jammer power must be >= 0");

  const double jamming = jam_gain * jammer_power_w;
  double residual = 0.0;  // sum of P_l for l < i
  for (std::size_t l = 0; l < ue; ++l) residual += powers_w[l];

  std::vector<double> chain;
  chain.reserve(powers_w.size() - ue);
  for (std::size_t i = ue; i < powers_w.size(); ++i) {
    chain.push_back(gain * powers_w[i] / (gain * residual + jamming + noise_w));
    residual += powers_w[i];
  }
  return chain;
}

std::vector<double> sinr_chain(double gain, std::span<const double> powers_w, double noise_w,
                               std::size_t ue) {
  return sinjr_chain(gain, 0.0, powers_w, 0.0, noise_w, ue);
}

}  // namespace nomajam
