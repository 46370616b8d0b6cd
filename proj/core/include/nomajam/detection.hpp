#pragma once

#include "nomajam/quadrature.hpp"
#include "nomajam/scenario.hpp"

namespace nomajam {

/// Upper tail of the standard Gaussian, Q(x) = P(Z > x).
double q_function(double x);

/// Parameters of the jammer's energy detector.
struct DetectionInputs {
  double total_power_w = 0.0;   // P_t radiated by the gNB
  double threshold_w = 0.0;     // P_th, compared against the energy statistic
  double noise_w = 0.0;         // sigma^2
  int num_samples = 100;        // N
  double distance_m = 0.0;      // gNB to jammer
  double pathloss_exponent = 2.5;
};

/// Detection inputs for `scenario` with the gNB radiating `total_power_w`.
DetectionInputs detection_inputs(const Scenario& scenario, double total_power_w);

/// Energy-detector hit probability at a fixed jammer-side SNR (no fading).
double detection_prob_awgn(const DetectionInputs& in, double jammer_snr);

/// Density of the jammer-side SNR under Rayleigh fading (exponential with mean
/// P_t / (sigma^2 d^nu)).
double jammer_snr_density(const DetectionInputs& in, double snr);

/// Detection probability averaged over Rayleigh fading, with relative error
/// around 1e-10 even when the result is astronomically small. Throws
/// QuadratureError on non-convergence.
double detection_prob_rayleigh(const DetectionInputs& in);

/// Same, returning the quadrature bookkeeping. `rel_tol` is the relative
/// accuracy requested from the quadrature.
QuadratureResult detection_prob_rayleigh_detailed(const DetectionInputs& in,
                                                  double rel_tol = 1e-12);

/// Threshold P_th making detection_prob_rayleigh equal `target_pd` when the
/// gNB radiates `at_total_power_w`. `in.threshold_w` is ignored. Throws
/// PreconditionError for target outside (0, 1), BracketError if unreachable.
double calibrate_threshold(double target_pd, double at_total_power_w, DetectionInputs in);

/// None -> 0, Barrage -> 1, Reactive -> detection_prob_rayleigh.
double effective_detection_prob(JammerMode mode, const DetectionInputs& in);

}  // namespace nomajam
