#include <doctest.h>

#include <cmath>

#include <nomajam/errors.hpp>
#include <nomajam/metrics.hpp>
#include <nomajam/montecarlo.hpp>

#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace nomajam;

namespace {

double z_score(const McEstimate& e, double analytic) {
  if (e.std_err == 0.0) return e.mean == analytic ? 0.0 : INFINITY;
  return (e.mean - analytic) / e.std_err;
}

// Success probabilities in the tens of percent so that sampling is meaningful.
Scenario moderate() {
  Scenario s = testing::reference(oracle::kCalibratedThresholdW);
  s.tx.blocklength = 70;
  s.tx.noma_powers_w = {mw_to_w(5), mw_to_w(60)};
  return s;
}

}  // namespace

TEST_CASE("estimates are deterministic and independent of thread count") {
  const Scenario s = moderate();
  McConfig cfg;
  cfg.trials = 20'000;
  cfg.rng_seed = 99;
  cfg.threads = 1;
  const McEstimate a = mc_success_prob(s, 0, cfg);
  const McEstimate b = mc_success_prob(s, 0, cfg);
  cfg.threads = 3;
  const McEstimate c = mc_success_prob(s, 0, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.mean == c.mean);
  CHECK(a.std_err == c.std_err);
  CHECK(a.trials == 20'000);
  cfg.rng_seed = 100;
  CHECK(mc_success_prob(s, 0, cfg).mean != a.mean);

  cfg.arrivals = 50'000;
  cfg.threads = 1;
  const McEstimate d1 = mc_delay(s, 0, cfg);
  cfg.threads = 4;
  CHECK(mc_delay(s, 0, cfg).mean == d1.mean);
}

TEST_CASE("a single trial yields 0 or 1") {
  McConfig cfg;
  cfg.trials = 1;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.rng_seed = seed;
    const double m = mc_success_prob(moderate(), 1, cfg).mean;
    CHECK((m == 0.0 || m == 1.0));
  }
}

TEST_CASE("a silent jammer reproduces the jam-free success probability") {
  Scenario s = moderate();
  s.jammer.mode = JammerMode::None;
  McConfig cfg;
  cfg.trials = 100'000;
  for (std::size_t ue = 0; ue < 2; ++ue) {
    const McEstimate e = mc_success_prob(s, ue, cfg);
    CHECK(std::abs(z_score(e, success_prob_no_jam(s, ue))) <= 4.0);
  }
}

TEST_CASE("single-replica success agrees with the analytic model") {
  for (const JammerMode mode : {JammerMode::Reactive, JammerMode::Barrage}) {
    Scenario s = moderate();
    s.jammer.mode = mode;
    // Keep the jammed cascade away from zero so the comparison has power.
    if (mode == JammerMode::Barrage) s.jammer.tx_power_w = 1e-3;
    McConfig cfg;
    cfg.trials = 200'000;
    cfg.rng_seed = 7;
    for (std::size_t ue = 0; ue < 2; ++ue) {
      CAPTURE(ue);
      const McEstimate e = mc_success_prob(s, ue, cfg);
      CHECK(e.std_err > 0.0);
      CHECK(std::abs(z_score(e, success_prob(s, ue))) <= 4.0);
    }
  }
}

TEST_CASE("reliability with repetitions agrees with the analytic model") {
  Scenario s = moderate();
  s.tx.num_transmissions = 2;
  McConfig cfg;
  cfg.trials = 200'000;
  cfg.rng_seed = 11;
  for (std::size_t ue = 0; ue < 2; ++ue) {
    const McEstimate e = mc_reliability(s, ue, cfg);
    CHECK(std::abs(z_score(e, reliability(s, ue))) <= 4.0);
  }
}

TEST_CASE("sticky detection coincides with independent detection under barrage") {
  Scenario s = moderate();
  s.jammer.mode = JammerMode::Barrage;
  s.tx.num_transmissions = 3;
  McConfig cfg;
  cfg.trials = 30'000;
  const McEstimate independent = mc_reliability(s, 0, cfg);
  cfg.detection = DetectionMode::Sticky;
  const McEstimate sticky = mc_reliability(s, 0, cfg);
  CHECK(std::abs(independent.mean - sticky.mean) <= 4.0 * std::hypot(independent.std_err, sticky.std_err));
}

TEST_CASE("per-replica Rayleigh fading lowers success for the weak user") {
  const Scenario s = moderate();
  McConfig cfg;
  cfg.trials = 50'000;
  const double mean_gain_estimate = mc_success_prob(s, 0, cfg).mean;
  cfg.fading = FadingMode::PerReplicaRayleigh;
  const McEstimate faded = mc_success_prob(s, 0, cfg);
  CHECK(faded.mean >= 0.0);
  CHECK(faded.mean <= 1.0);
  CHECK(faded.mean != mean_gain_estimate);
}

TEST_CASE("no observed successes report zero standard error") {
  Scenario s = moderate();
  s.tx.noma_powers_w = {1e-9, 1e-9};
  McConfig cfg;
  cfg.trials = 1000;
  const McEstimate e = mc_success_prob(s, 0, cfg);
  CHECK(e.mean == 0.0);
  CHECK(e.std_err == 0.0);
}

TEST_CASE("queue simulation matches M/D/1 theory") {
  Scenario s = moderate();
  const double service = s.tx.num_transmissions * frame_duration_s(s.radio, s.tx.blocklength);
  McConfig cfg;
  cfg.arrivals = 1'000'000;

  SUBCASE("half load") {
    s.ues[0].arrival_rate_pps = 0.5 / service;
    const McEstimate e = mc_delay(s, 0, cfg);
    CHECK(std::abs(e.mean / avg_delay(s, 0) - 1.0) <= 0.02);
    CHECK(e.std_err > 0.0);
  }
  SUBCASE("light load") {
    s.ues[0].arrival_rate_pps = 0.01 / service;
    const McEstimate e = mc_delay(s, 0, cfg);
    CHECK(std::abs(e.mean / avg_delay(s, 0) - 1.0) <= 0.01);
  }
  SUBCASE("overload") {
    s.ues[0].arrival_rate_pps = 1.2 / service;
    CHECK_THROWS_AS(mc_delay(s, 0, cfg), QueueUnstableError);
  }
}

TEST_CASE("invalid configurations are rejected") {
  McConfig cfg;
  cfg.trials = 0;
  CHECK_THROWS_AS(mc_success_prob(moderate(), 0, cfg), PreconditionError);
  cfg.trials = 10;
  CHECK_THROWS_AS(mc_success_prob(moderate(), 5, cfg), PreconditionError);
}
