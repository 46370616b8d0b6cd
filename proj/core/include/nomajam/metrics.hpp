#pragma once

#include <cstddef>
#include <vector>

#include "nomajam/scenario.hpp"

namespace nomajam {

/// Per-UE network metrics at one operating point. Probabilities that sit close
/// to 1 are carried with their complements so five-nines values do not round.
struct UeMetrics {
  double success_no_jam = 0.0;   // p_m: SIC cascade succeeds, jammer silent
  double success_jam = 0.0;      // p_m^J: SIC cascade succeeds, jammer active
  double success_prob = 0.0;     // P_m: single-replica success
  double failure_prob = 1.0;     // 1 - P_m
  double reliability = 0.0;      // R_m = 1 - (1 - P_m)^L
  double outage = 1.0;           // 1 - R_m
  double utilization = 0.0;      // rho_m = lambda_m L T_f
  double delay_s = 0.0;          // mean M/D/1 sojourn; NaN when unstable
  double effective_rate_bps = 0.0;  // n_d R_m / D_m; NaN when unstable
  bool stable = true;
};

struct LinkMetrics {
  double detection_prob = 0.0;   // probability the jammer is active for a replica
  double frame_duration_s = 0.0;
  std::vector<UeMetrics> ues;
  double esr_bps = 0.0;          // sum of effective rates; NaN when any queue is unstable

  bool stable() const;
};

/// Jammer activity probability with the gNB radiating sum(P_m).
double detection_prob(const Scenario& scenario);

/// All metrics of the scenario's operating point. Never throws on queue
/// instability; unstable UEs are flagged instead.
LinkMetrics evaluate(const Scenario& scenario);

/// As evaluate(), reusing a jammer activity probability computed elsewhere.
LinkMetrics evaluate(const Scenario& scenario, double detection_prob);

// Per-UE operations. `ue` is zero-based.

double success_prob_no_jam(const Scenario& scenario, std::size_t ue);
double success_prob_jam(const Scenario& scenario, std::size_t ue);
double success_prob(const Scenario& scenario, std::size_t ue);
double reliability(const Scenario& scenario, std::size_t ue);

/// Throws QueueUnstableError when rho_m >= 1.
double avg_delay(const Scenario& scenario, std::size_t ue);
double effective_rate(const Scenario& scenario, std::size_t ue);
double esr(const Scenario& scenario);

// Building blocks, exposed for the oracle and property tests.

/// 1 - (1 - success)^L, accurate for success near 0 and near 1.
double reliability_from_success(double success, int transmissions);

/// Mean M/D/1 sojourn time (wait + service). Throws QueueUnstableError when
/// arrival_rate * service_time >= 1.
double md1_mean_sojourn(double arrival_rate, double service_time_s);

/// Effective rate in the expanded closed form
/// 2 n_d (1 - lambda L T_f)(1 - (1 - P)^L) / (L T_f (2 - lambda L T_f)).
double effective_rate_expanded(int payload_bits, double arrival_rate, int transmissions,
                               double frame_duration_s, double success);

}  // namespace nomajam
