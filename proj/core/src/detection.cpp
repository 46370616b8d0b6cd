#include "nomajam/detection.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "nomajam/channel.hpp"
#include "nomajam/errors.hpp"

namespace nomajam {
namespace {

// The integrand is dropped where it sits this many e-folds below its peak.
constexpr double kWindow = 60.0;

// Below e^-750 a probability rounds to zero in double precision.
constexpr double kLogNegligible = -750.0;

void check_inputs(const DetectionInputs& in) {
  if (!(in.noise_w > 0.0)) throw PreconditionError("detection: noise power must be > 0");
  if (!(in.threshold_w > 0.0)) throw PreconditionError("detection: threshold P_th must be > 0");
  if (in.num_samples < 1) throw PreconditionError("detection: sample count N must be >= 1");
  if (!(in.distance_m > 0.0)) throw PreconditionError("detection: gNB-jammer distance must be > 0");
  if (in.total_power_w < 0.0) throw PreconditionError("detection: total power must be >= 0");
}

// sigma^2 d^nu / P_t: rate of the exponential jammer-side SNR.
double snr_rate(const DetectionInputs& in) {
  return in.noise_w / (mean_gain(in.distance_m, in.pathloss_exponent) * in.total_power_w);
}

double q_function_impl(double x) { return 0.5 * std::erfc(x * std::numbers::sqrt2 * 0.5); }

// log Q(x) without underflow; asymptotic series once Q drops below ~1e-268.
double log_q_function(double x) {
  if (x < 35.0) return std::log(q_function_impl(x));
  const double inv2 = 1.0 / (x * x);
  return -0.5 * x * x - std::log(x * std::sqrt(2.0 * std::numbers::pi)) +
         std::log1p(-inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2))));
}

double awgn_unchecked(const DetectionInputs& in, double snr) {
  const double ratio = in.threshold_w / ((snr + 1.0) * in.noise_w);
  return q_function(std::sqrt(static_cast<double>(in.num_samples)) * (ratio - 1.0));
}

}  // namespace

double q_function(double x) { return q_function_impl(x); }

DetectionInputs detection_inputs(const Scenario& scenario, double total_power_w) {
  return DetectionInputs{total_power_w,
                         scenario.jammer.trigger_threshold_w,
                         noise_power_w(scenario.radio),
                         scenario.jammer.num_samples,
                         scenario.jammer.distance_gnb_m,
                         scenario.radio.pathloss_exponent};
}

double detection_prob_awgn(const DetectionInputs& in, double jammer_snr) {
  check_inputs(in);
  if (jammer_snr < 0.0) throw PreconditionError("detection: jammer SNR must be >= 0");
  return awgn_unchecked(in, jammer_snr);
}

double jammer_snr_density(const DetectionInputs& in, double snr) {
  check_inputs(in);
  if (snr < 0.0) return 0.0;
  const double rate = snr_rate(in);
  return rate * std::exp(-rate * snr);
}

QuadratureResult detection_prob_rayleigh_detailed(const DetectionInputs& in, double rel_tol) {
  check_inputs(in);
  if (in.total_power_w == 0.0) return QuadratureResult{awgn_unchecked(in, 0.0), 0.0, 1, 0};

  // Over u = rate * snr (Exp(1)) the integrand is h(u) = Q(x(u)) e^-u. log h
  // is concave (log Q is concave and decreasing, x(u) is convex), so it has a
  // single peak. Integrating h / h(peak) over the window where it exceeds
  // e^-kWindow keeps full relative precision when P_d is far below 1e-300.
  const double rate = snr_rate(in);
  const double root_n = std::sqrt(static_cast<double>(in.num_samples));
  const double t = in.threshold_w / in.noise_w;
  auto log_h = [&](double u) { return log_q_function(root_n * (t / (u / rate + 1.0) - 1.0)) - u; };

  // Rigorous bound P_d <= Q(k) + P(u > u_k), with u_k where the detector
  // argument equals k. Far below the double range the answer is exactly 0.
  double log_bound = 0.0;
  for (double k = 0.5; k < 1e9; k *= 1.5) {
    const double u_k = rate * (t / (1.0 + k / root_n) - 1.0);
    if (u_k <= 0.0) break;
    log_bound = std::min(log_bound, std::numbers::ln2 + std::max(log_q_function(k), -u_k));
  }
  if (log_bound < kLogNegligible) return QuadratureResult{0.0, std::exp(log_bound), 0, 0};

  // The detector switches on near snr = t - 1; the peak cannot lie far beyond
  // it because h <= e^-u while Q saturates at one.
  const double u_step = rate * (t - 1.0);
  const double search_hi = std::max(u_step, 0.0) + kWindow;
  std::uintmax_t iters = 200;
  const auto [u_peak, neg_peak] = boost::math::tools::brent_find_minima(
      [&](double u) { return -log_h(u); }, 0.0, search_hi, std::numeric_limits<double>::digits / 2, iters);
  const double log_peak = std::max(-neg_peak, log_h(0.0));
  const double peak = log_h(0.0) >= -neg_peak ? 0.0 : u_peak;

  // Window edges where log h falls kWindow below the peak. Beyond the right
  // edge h <= e^-u, so 2 * kWindow - log_peak is a safe outer bracket.
  auto edge = [&](double inside, double outside) {
    for (int i = 0; i < 200 && std::abs(outside - inside) > 1e-6 * std::max(1.0, std::abs(inside)); ++i) {
      const double mid = 0.5 * (inside + outside);
      (log_h(mid) > log_peak - kWindow ? inside : outside) = mid;
    }
    return outside;
  };
  const double lo = log_h(0.0) > log_peak - kWindow ? 0.0 : edge(peak, 0.0);
  const double hi = edge(peak, std::max(peak, 0.0) + 2.0 * kWindow - std::min(log_peak, 0.0));

  // log h is a difference of terms as large as |log_peak| + 2 hi, whose
  // rounding sets a floor on the attainable relative accuracy.
  QuadratureOptions opts;
  opts.abs_tol = 1e-300;
  opts.rel_tol = std::max(rel_tol, 32.0 * std::numeric_limits<double>::epsilon() * (std::abs(log_peak) + 2.0 * hi));
  auto scaled = [&](double u) { return std::exp(log_h(u) - log_peak); };

  std::vector<double> cuts = {lo, hi};
  for (const double c : {peak, u_step})
    if (c > lo && c < hi) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());

  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    const QuadratureResult part = integrate_adaptive(scaled, cuts[i], cuts[i + 1], opts);
    total.value += part.value;
    total.error_estimate += part.error_estimate;
    total.evaluations += part.evaluations;
    total.intervals += part.intervals;
  }
  // Mass outside the window: at most e^-kWindow per unit length on the left
  // and e^-kWindow in the exponential right tail.
  total.error_estimate += std::exp(-kWindow) * (lo + 1.0);
  const double factor = std::exp(log_peak);
  total.value = std::min(1.0, total.value * factor);
  total.error_estimate *= factor;
  return total;
}

double detection_prob_rayleigh(const DetectionInputs& in) {
  return detection_prob_rayleigh_detailed(in).value;
}

double calibrate_threshold(double target_pd, double at_total_power_w, DetectionInputs in) {
  if (!(target_pd > 0.0 && target_pd < 1.0))
    throw PreconditionError("calibrate_threshold: target must lie in (0, 1)");
  if (!(at_total_power_w > 0.0))
    throw PreconditionError("calibrate_threshold: calibration power must be > 0");
  in.total_power_w = at_total_power_w;
  in.threshold_w = in.noise_w;  // satisfies check_inputs; overwritten below
  check_inputs(in);

  // Solve in t = log(P_th / sigma^2). P_d falls monotonically as t grows.
  auto residual = [&](double t) {
    DetectionInputs trial = in;
    trial.threshold_w = in.noise_w * std::exp(t);
    return detection_prob_rayleigh(trial) - target_pd;
  };

  double lo = 0.0;
  if (residual(lo) < 0.0) {
    std::ostringstream msg;
    msg << "calibrate_threshold: detection probability " << target_pd
        << " is unreachable even with P_th = sigma^2 at P_t = " << at_total_power_w << " W";
    throw BracketError(msg.str());
  }
  // The jammer-side SNR can sit many decades above the noise floor, so the
  // upper end is found by stepping a decade at a time.
  constexpr double kMaxLog = 80.0 * std::numbers::ln10;
  double hi = std::numbers::ln10;
  double f_hi = residual(hi);
  while (f_hi > 0.0) {
    lo = hi;
    hi += std::numbers::ln10;
    if (hi > kMaxLog) {
      std::ostringstream msg;
      msg << "calibrate_threshold: could not bracket detection probability " << target_pd
          << " below P_th = 1e80 sigma^2";
      throw BracketError(msg.str());
    }
    f_hi = residual(hi);
  }

  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      residual, lo, hi, residual(lo), f_hi, boost::math::tools::eps_tolerance<double>(48), max_iter);
  return in.noise_w * std::exp(0.5 * (a + b));
}

double effective_detection_prob(JammerMode mode, const DetectionInputs& in) {
  switch (mode) {
    case JammerMode::None:
      return 0.0;
    case JammerMode::Barrage:
      return 1.0;
    case JammerMode::Reactive:
      return detection_prob_rayleigh(in);
  }
  return 0.0;
}

}  // namespace nomajam
