#include "nomajam/montecarlo.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "nomajam/channel.hpp"
#include "nomajam/errors.hpp"
#include "nomajam/fbl.hpp"
#include "nomajam/rng.hpp"
#include "parallel.hpp"

namespace nomajam {
namespace {

constexpr std::uint64_t kChunk = 4096;
constexpr std::uint64_t kSuccessSalt = 0x51;
constexpr std::uint64_t kReliabilitySalt = 0x52;
constexpr std::uint64_t kDelaySalt = 0x53;

McEstimate bernoulli_estimate(std::uint64_t hits, std::uint64_t trials) {
  McEstimate e;
  e.trials = trials;
  e.mean = static_cast<double>(hits) / static_cast<double>(trials);
  e.std_err = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(trials));
  return e;
}

/// One replica of one packet for a single UE.
class ReplicaSimulator {
 public:
  ReplicaSimulator(const Scenario& s, std::size_t ue, FadingMode fading)
      : s_(s), ue_(ue), fading_(fading), noise_(noise_power_w(s.radio)) {
    if (ue >= s.ues.size()) throw PreconditionError("UE index outside the NOMA cluster");
    const double nu = s.radio.pathloss_exponent;
    gain_ = mean_gain(s.ues[ue].distance_gnb_m, nu);
    jam_gain_ = mean_gain(s.ues[ue].distance_jammer_m, nu);
    jammer_link_ = mean_gain(s.jammer.distance_gnb_m, nu);
    if (fading_ == FadingMode::MeanGain) {
      clear_stages_ = stage_success(sinr_chain(gain_, s.tx.noma_powers_w, noise_, ue));
      jammed_stages_ = stage_success(
          sinjr_chain(gain_, jam_gain_, s.tx.noma_powers_w, s.jammer.tx_power_w, noise_, ue));
    }
  }

  /// Jammer decision for one replica: energy statistic against P_th.
  bool jammer_triggers(Rng& rng) const {
    switch (s_.jammer.mode) {
      case JammerMode::None:
        return false;
      case JammerMode::Barrage:
        return true;
      case JammerMode::Reactive:
        break;
    }
    const double link = std::exponential_distribution<double>(1.0 / jammer_link_)(rng);
    const double snr = link * s_.tx.total_power_w() / noise_;
    const double level = (snr + 1.0) * noise_;
    const double spread = level / std::sqrt(static_cast<double>(s_.jammer.num_samples));
    const double statistic = std::normal_distribution<double>(level, spread)(rng);
    return statistic > s_.jammer.trigger_threshold_w;
  }

  bool decodes(bool jammed, Rng& rng) const {
    if (fading_ == FadingMode::MeanGain) {
      for (const double p : jammed ? jammed_stages_ : clear_stages_)
        if (!bernoulli(rng, p)) return false;
      return true;
    }
    const double nu = s_.radio.pathloss_exponent;
    const double gain = sample_gain(s_.ues[ue_].distance_gnb_m, nu, rng);
    const double jam_gain = sample_gain(s_.ues[ue_].distance_jammer_m, nu, rng);
    const std::vector<double> sinrs =
        jammed ? sinjr_chain(gain, jam_gain, s_.tx.noma_powers_w, s_.jammer.tx_power_w, noise_, ue_)
               : sinr_chain(gain, s_.tx.noma_powers_w, noise_, ue_);
    for (const double sinr : sinrs)
      if (!bernoulli(rng, decode_success_prob(sinr, s_.tx.code(), s_.tx.dispersion))) return false;
    return true;
  }

 private:
  std::vector<double> stage_success(const std::vector<double>& sinrs) const {
    std::vector<double> out;
    for (const double sinr : sinrs)
      out.push_back(decode_success_prob(sinr, s_.tx.code(), s_.tx.dispersion));
    return out;
  }

  const Scenario& s_;
  std::size_t ue_;
  FadingMode fading_;
  double noise_;
  double gain_ = 0.0;
  double jam_gain_ = 0.0;
  double jammer_link_ = 0.0;
  std::vector<double> clear_stages_;
  std::vector<double> jammed_stages_;
};

template <typename Trial>
std::uint64_t count_hits(const McConfig& cfg, std::uint64_t salt, Trial&& trial) {
  if (cfg.trials < 1) throw PreconditionError("Monte Carlo needs at least one trial");
  const std::uint64_t chunks = (cfg.trials + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  detail::parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    Rng rng = make_stream(cfg.rng_seed, c, salt);
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(cfg.trials, begin + kChunk);
    std::uint64_t local = 0;
    for (std::uint64_t t = begin; t < end; ++t) local += trial(rng) ? 1 : 0;
    hits[c] = local;
  });
  return std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
}

}  // namespace

McEstimate mc_success_prob(const Scenario& s, std::size_t ue, const McConfig& cfg) {
  const ReplicaSimulator sim(s, ue, cfg.fading);
  const auto hits = count_hits(cfg, kSuccessSalt + 16 * ue, [&](Rng& rng) {
    const bool jammed = sim.jammer_triggers(rng);
    return sim.decodes(jammed, rng);
  });
  return bernoulli_estimate(hits, cfg.trials);
}

McEstimate mc_reliability(const Scenario& s, std::size_t ue, const McConfig& cfg) {
  const ReplicaSimulator sim(s, ue, cfg.fading);
  const int replicas = s.tx.num_transmissions;
  if (replicas < 1) throw PreconditionError("transmission count L must be >= 1");
  const auto hits = count_hits(cfg, kReliabilitySalt + 16 * ue, [&](Rng& rng) {
    bool jammed = false;
    for (int r = 0; r < replicas; ++r) {
      if (cfg.detection == DetectionMode::PerReplicaIndependent || !jammed)
        jammed = sim.jammer_triggers(rng);
      if (sim.decodes(jammed, rng)) return true;
    }
    return false;
  });
  return bernoulli_estimate(hits, cfg.trials);
}

McEstimate mc_delay(const Scenario& s, std::size_t ue, const McConfig& cfg) {
  if (ue >= s.ues.size()) throw PreconditionError("UE index outside the NOMA cluster");
  if (cfg.arrivals < 2) throw PreconditionError("queue simulation needs at least two arrivals");
  if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0))
    throw PreconditionError("warm-up fraction must lie in [0, 1)");

  const double lambda = s.ues[ue].arrival_rate_pps;
  const double service = s.tx.num_transmissions * frame_duration_s(s.radio, s.tx.blocklength);
  const double rho = lambda * service;
  auto unstable = [&](const std::string& why) {
    std::ostringstream msg;
    msg << "M/D/1 queue unstable (utilization " << rho << "): " << why;
    return QueueUnstableError(msg.str(), rho);
  };
  if (rho >= 1.0) throw unstable("utilization >= 1");

  const auto warmup = static_cast<std::uint64_t>(cfg.warmup_fraction * cfg.arrivals);
  const std::uint64_t kept = cfg.arrivals - warmup;
  if (lambda == 0.0) return McEstimate{service, 0.0, kept};

  // Lindley recursion on the waiting time of successive arrivals.
  Rng rng = make_stream(cfg.rng_seed, 0, kDelaySalt + 16 * ue);
  std::exponential_distribution<double> gap(lambda);
  const int batches = std::max(2, cfg.batches);
  const std::uint64_t per_batch = std::max<std::uint64_t>(1, kept / batches);
  std::vector<double> batch_sums(batches, 0.0);
  std::vector<std::uint64_t> batch_counts(batches, 0);
  double wait = 0.0;
  double total = 0.0;
  for (std::uint64_t n = 0; n < cfg.arrivals; ++n) {
    if (wait > cfg.backlog_limit * service) throw unstable("backlog exceeded the simulation bound");
    if (n >= warmup) {
      const double sojourn = wait + service;
      const std::uint64_t b = std::min<std::uint64_t>((n - warmup) / per_batch, batches - 1);
      batch_sums[b] += sojourn;
      ++batch_counts[b];
      total += sojourn;
    }
    wait = std::max(0.0, wait + service - gap(rng));
  }

  McEstimate e;
  e.trials = kept;
  e.mean = total / static_cast<double>(kept);
  double spread = 0.0;
  for (int b = 0; b < batches; ++b) {
    const double m = batch_sums[b] / static_cast<double>(batch_counts[b]);
    spread += (m - e.mean) * (m - e.mean);
  }
  e.std_err = std::sqrt(spread / (batches - 1) / batches);
  return e;
}

}  // namespace nomajam
