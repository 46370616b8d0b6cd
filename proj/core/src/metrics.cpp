#include "nomajam/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nomajam/channel.hpp"
#include "nomajam/detection.hpp"
#include "nomajam/errors.hpp"
#include "nomajam/fbl.hpp"

namespace nomajam {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CascadeOutcome {
  double success = 0.0;
  double failure = 1.0;
};

// Product of per-stage success probabilities, with its complement evaluated
// from the same log-sum so neither side cancels.
CascadeOutcome cascade(std::span<const double> sinrs, const CodeSpec& code, DispersionModel model) {
  double log_success = 0.0;
  for (const double sinr : sinrs) {
    const double eps = bler(sinr, code, model);
    log_success += eps < 0.5 ? std::log1p(-eps) : std::log(decode_success_prob(sinr, code, model));
  }
  return {std::exp(log_success), -std::expm1(log_success)};
}

CascadeOutcome cascade_for(const Scenario& s, std::size_t ue, bool jammed) {
  if (ue >= s.ues.size()) throw PreconditionError("UE index outside the NOMA cluster");
  const double noise = noise_power_w(s.radio);
  const double gain = mean_gain(s.ues[ue].distance_gnb_m, s.radio.pathloss_exponent);
  const std::vector<double> sinrs =
      jammed ? sinjr_chain(gain, mean_gain(s.ues[ue].distance_jammer_m, s.radio.pathloss_exponent),
                           s.tx.noma_powers_w, s.jammer.tx_power_w, noise, ue)
             : sinr_chain(gain, s.tx.noma_powers_w, noise, ue);
  return cascade(sinrs, s.tx.code(), s.tx.dispersion);
}

// (1 - P)^L and 1 - (1 - P)^L given both P and 1 - P.
void apply_diversity(UeMetrics& m, int transmissions) {
  if (transmissions < 1) throw PreconditionError("transmission count L must be >= 1");
  const double L = transmissions;
  m.outage = std::pow(m.failure_prob, L);
  m.reliability = m.failure_prob > 0.5 ? -std::expm1(L * std::log1p(-m.success_prob))
                                       : 1.0 - m.outage;
}

UeMetrics ue_metrics(const Scenario& s, std::size_t ue, double pd, double frame_s) {
  UeMetrics m;
  const CascadeOutcome clear = cascade_for(s, ue, false);
  const CascadeOutcome jammed = cascade_for(s, ue, true);
  m.success_no_jam = clear.success;
  m.success_jam = jammed.success;
  m.success_prob = pd * jammed.success + (1.0 - pd) * clear.success;
  m.failure_prob = pd * jammed.failure + (1.0 - pd) * clear.failure;
  apply_diversity(m, s.tx.num_transmissions);

  const double service = s.tx.num_transmissions * frame_s;
  m.utilization = s.ues[ue].arrival_rate_pps * service;
  if (m.utilization < 1.0) {
    m.delay_s = md1_mean_sojourn(s.ues[ue].arrival_rate_pps, service);
    m.effective_rate_bps = s.tx.payload_bits * m.reliability / m.delay_s;
  } else {
    m.stable = false;
    m.delay_s = kNaN;
    m.effective_rate_bps = kNaN;
  }
  return m;
}

}  // namespace

bool LinkMetrics::stable() const {
  for (const auto& ue : ues)
    if (!ue.stable) return false;
  return true;
}

double detection_prob(const Scenario& s) {
  const double total = s.tx.total_power_w();
  return effective_detection_prob(s.jammer.mode, detection_inputs(s, total));
}

LinkMetrics evaluate(const Scenario& s) { return evaluate(s, detection_prob(s)); }

LinkMetrics evaluate(const Scenario& s, double pd) {
  LinkMetrics out;
  out.detection_prob = pd;
  out.frame_duration_s = frame_duration_s(s.radio, s.tx.blocklength);
  out.ues.reserve(s.ues.size());
  double sum = 0.0;
  for (std::size_t ue = 0; ue < s.ues.size(); ++ue) {
    out.ues.push_back(ue_metrics(s, ue, pd, out.frame_duration_s));
    sum += out.ues.back().effective_rate_bps;
  }
  out.esr_bps = sum;  // NaN propagates from unstable UEs
  return out;
}

double success_prob_no_jam(const Scenario& s, std::size_t ue) {
  return cascade_for(s, ue, false).success;
}

double success_prob_jam(const Scenario& s, std::size_t ue) {
  return cascade_for(s, ue, true).success;
}

double success_prob(const Scenario& s, std::size_t ue) {
  const double pd = detection_prob(s);
  return pd * success_prob_jam(s, ue) + (1.0 - pd) * success_prob_no_jam(s, ue);
}

double reliability(const Scenario& s, std::size_t ue) {
  const double pd = detection_prob(s);
  return ue_metrics(s, ue, pd, frame_duration_s(s.radio, s.tx.blocklength)).reliability;
}

double avg_delay(const Scenario& s, std::size_t ue) {
  if (ue >= s.ues.size()) throw PreconditionError("UE index outside the NOMA cluster");
  if (s.tx.num_transmissions < 1) throw PreconditionError("transmission count L must be >= 1");
  const double service = s.tx.num_transmissions * frame_duration_s(s.radio, s.tx.blocklength);
  return md1_mean_sojourn(s.ues[ue].arrival_rate_pps, service);
}

double effective_rate(const Scenario& s, std::size_t ue) {
  const double delay = avg_delay(s, ue);
  return s.tx.payload_bits * reliability(s, ue) / delay;
}

double esr(const Scenario& s) {
  const LinkMetrics m = evaluate(s);
  for (const auto& ue : m.ues) {
    if (!ue.stable) {
      std::ostringstream msg;
      msg << "M/D/1 queue unstable: utilization " << ue.utilization << " >= 1";
      throw QueueUnstableError(msg.str(), ue.utilization);
    }
  }
  return m.esr_bps;
}

double reliability_from_success(double success, int transmissions) {
  if (!(success >= 0.0 && success <= 1.0)) throw PreconditionError("success probability outside [0, 1]");
  UeMetrics m;
  m.success_prob = success;
  m.failure_prob = 1.0 - success;  // exact for success >= 0.5
  apply_diversity(m, transmissions);
  return m.reliability;
}

double md1_mean_sojourn(double arrival_rate, double service_time_s) {
  if (arrival_rate < 0.0 || !(service_time_s > 0.0))
    throw PreconditionError("M/D/1 needs arrival rate >= 0 and service time > 0");
  const double rho = arrival_rate * service_time_s;
  if (rho >= 1.0) {
    std::ostringstream msg;
    msg << "M/D/1 queue unstable: utilization " << rho << " >= 1";
    throw QueueUnstableError(msg.str(), rho);
  }
  return (2.0 - rho) / (2.0 * (1.0 - rho)) * service_time_s;
}

double effective_rate_expanded(int payload_bits, double arrival_rate, int transmissions,
                               double frame_s, double success) {
  const double service = transmissions * frame_s;
  const double rho = arrival_rate * service;
  if (rho >= 1.0) {
    std::ostringstream msg;
    msg << "M/D/1 queue unstable: utilization " << rho << " >= 1";
    throw QueueUnstableError(msg.str(), rho);
  }
  const double reliability = -std::expm1(transmissions * std::log1p(-success));
  return 2.0 * payload_bits * (1.0 - rho) * reliability / (service * (2.0 - rho));
}

}  // namespace nomajam
