#pragma once

#include <cstddef>
#include <cstdint>

#include "nomajam/scenario.hpp"

namespace nomajam {

enum class FadingMode {
  MeanGain,            // UE links fixed at their mean gain
  PerReplicaRayleigh,  // fresh Rayleigh draw of every link for each replica
};

enum class DetectionMode {
  PerReplicaIndependent,  // jammer decision redrawn for each replica
  Sticky,                 // once triggered, the jammer stays on for the packet
};

struct McConfig {
  std::uint64_t trials = 100'000;
  std::uint64_t rng_seed = 1;
  FadingMode fading = FadingMode::MeanGain;
  DetectionMode detection = DetectionMode::PerReplicaIndependent;
  int threads = 0;

  // Queue simulation.
  std::uint64_t arrivals = 1'000'000;
  double warmup_fraction = 0.1;
  int batches = 50;
  /// Backlog, in service times, beyond which the queue is declared unstable.
  double backlog_limit = 1e4;
};

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::uint64_t trials = 0;
};

/// Single-replica decode success of UE `ue` (zero-based), P_m.
///
/// Each trial draws the jammer's energy statistic from the gNB-jammer Rayleigh
/// link, then runs the SIC cascade stage by stage with Bernoulli decodes.
McEstimate mc_success_prob(const Scenario& scenario, std::size_t ue, const McConfig& cfg);

/// Packet delivery with L replicas: success if any replica decodes.
McEstimate mc_reliability(const Scenario& scenario, std::size_t ue, const McConfig& cfg);

/// Mean sojourn time of a discrete-event M/D/1 queue with Poisson(lambda_m)
/// arrivals and service L T_f. Standard error from batch means. Throws
/// QueueUnstableError when utilization >= 1 or the backlog exceeds the limit.
McEstimate mc_delay(const Scenario& scenario, std::size_t ue, const McConfig& cfg);

}  // namespace nomajam
