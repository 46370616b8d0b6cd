#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <nomajam/errors.hpp>
#include <nomajam/optimizer.hpp>

#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace nomajam;

namespace {

Scenario base() { return testing::reference(oracle::kCalibratedThresholdW); }

GaSettings quick(std::uint64_t seed) {
  GaSettings g;
  g.population_size = 60;
  g.max_generations = 60;
  g.islands = 3;
  g.migration_interval = 10;
  g.rng_seed = seed;
  g.threads = 1;
  return g;
}

const Violation* find(const FeasibilityReport& r, Constraint c) {
  const auto it = std::find_if(r.violations.begin(), r.violations.end(),
                               [c](const Violation& v) { return v.constraint == c; });
  return it == r.violations.end() ? nullptr : &*it;
}

}  // namespace

TEST_CASE("feasibility reports the broken constraint with its margin") {
  const Scenario s = base();
  SUBCASE("SIC order") {
    const FeasibilityReport r = feasible({{60, 50}, 1, 83}, s, 1e-6);
    const Violation* v = find(r, Constraint::SicOrder);
    REQUIRE(v != nullptr);
    CHECK(v->margin == doctest::Approx(-10.0));
    CHECK(v->ue == 0);
    CHECK_FALSE(r.ok());
  }
  SUBCASE("power budget") {
    const FeasibilityReport r = feasible({{50, 60}, 1, 83}, s, 1e-6);
    const Violation* v = find(r, Constraint::PowerBudget);
    REQUIRE(v != nullptr);
    CHECK(v->margin == doctest::Approx(-10.0));
  }
  SUBCASE("positivity and integrality") {
    CHECK(find(feasible({{0, 60}, 1, 83}, s, 1e-6), Constraint::PositivePower) != nullptr);
    CHECK(find(feasible({{10, 60}, 0, 83}, s, 1e-6), Constraint::Integrality) != nullptr);
    CHECK(find(feasible({{10, 60}, 1, 0}, s, 1e-6), Constraint::Integrality) != nullptr);
  }
  SUBCASE("unstable queue is a delay violation") {
    Scenario hot = s;
    for (auto& ue : hot.ues) ue.arrival_rate_pps = 1e4;
    const Violation* v = find(feasible({{10, 60}, 1, 83}, hot, 1e-6), Constraint::Delay);
    REQUIRE(v != nullptr);
    CHECK(std::isinf(v->margin));
    CHECK(std::isinf(fitness({{10, 60}, 1, 83}, hot, 1e-6).objective));
  }
  SUBCASE("reliability floor") {
    Scenario strict = s;
    strict.urllc.reliability_floor = 1.0 - 1e-12;
    const FeasibilityReport r = feasible({{10, 60}, 1, 80}, strict, 1e-6);
    CHECK(find(r, Constraint::Reliability) != nullptr);
    CHECK(r.aggregate_violation > 0.0);
  }
  CHECK(to_string(Constraint::SicOrder).size() > 0);
}

TEST_CASE("feasibility-first ranking") {
  const Fitness good{-1e5, 0.0, true};
  const Fitness better{-2e5, 0.0, true};
  const Fitness slightly_bad{-9e9, 0.1, false};
  const Fitness very_bad{-9e9, 3.0, false};
  CHECK(ranks_before(better, good));
  CHECK_FALSE(ranks_before(good, better));
  CHECK(ranks_before(good, slightly_bad));
  CHECK_FALSE(ranks_before(slightly_bad, good));
  CHECK(ranks_before(slightly_bad, very_bad));
  CHECK_FALSE(ranks_before(good, good));
}

TEST_CASE("apply_decision substitutes the decision variables") {
  const Scenario s = apply_decision(base(), {{3, 7}, 4, 120});
  CHECK(s.tx.noma_powers_w[0] == doctest::Approx(0.003));
  CHECK(s.tx.noma_powers_w[1] == doctest::Approx(0.007));
  CHECK(s.tx.num_transmissions == 4);
  CHECK(s.tx.blocklength == 120);
}

TEST_CASE("GA is deterministic, monotone and within its generation budget") {
  const Scenario s = base();
  const GaSettings g = quick(5);
  const OptimizationResult a = solve(s, g);
  const OptimizationResult b = solve(s, g);
  CHECK(a.best == b.best);
  CHECK(a.esr_bps == b.esr_bps);
  CHECK(a.generations_run <= g.max_generations);
  REQUIRE_FALSE(a.trace.empty());
  for (std::size_t i = 1; i < a.trace.size(); ++i) {
    const auto& prev = a.trace[i - 1];
    const auto& cur = a.trace[i];
    const Fitness fp{prev.best_objective, prev.best_violation, prev.best_feasible};
    const Fitness fc{cur.best_objective, cur.best_violation, cur.best_feasible};
    CHECK_FALSE(ranks_before(fp, fc));
  }
  CHECK(a.feasible);
  CHECK(a.report.ok());
  for (const double r : a.reliability) CHECK(r >= s.urllc.reliability_floor * (1 - 1e-9));
  for (const double d : a.delay_s) CHECK(d <= s.urllc.delay_ceiling_s * (1 + 1e-6));

  GaSettings threaded = g;
  threaded.threads = 3;
  const OptimizationResult c = solve(s, threaded);
  CHECK(c.best == a.best);
}

TEST_CASE("GA result is repaired into the search box") {
  const OptimizationResult r = solve(base(), quick(9));
  CHECK(r.best.powers_mw[0] > 0.0);
  CHECK(r.best.powers_mw[0] <= r.best.powers_mw[1]);
  CHECK(r.best.powers_mw[0] + r.best.powers_mw[1] <= 100.0 * (1 + 1e-9));
  CHECK(r.best.transmissions >= 1);
  CHECK(r.best.blocklength >= 1);
}

TEST_CASE("exhaustive baseline") {
  const Scenario s = base();
  SUBCASE("single-point grid returns that point") {
    GridSpec grid;
    grid.power_step_mw = 50.0;
    grid.min_transmissions = grid.max_transmissions = 1;
    grid.min_blocklength = grid.max_blocklength = 80;
    const OptimizationResult r = exhaustive_baseline(s, grid);
    CHECK(r.best.powers_mw == std::vector<double>{50.0, 50.0});
    CHECK(r.best.blocklength == 80);
  }
  SUBCASE("small grid picks the best feasible point") {
    GridSpec grid;
    grid.power_step_mw = 1.0;
    grid.max_transmissions = 1;
    grid.min_blocklength = 112;
    grid.max_blocklength = 124;
    const OptimizationResult r = exhaustive_baseline(s, grid);
    REQUIRE(r.feasible);
    // Spot-check optimality against every grid neighbour of the winner.
    for (const double dp : {-1.0, 1.0}) {
      DecisionVector v = r.best;
      v.powers_mw[1] += dp;
      const Fitness f = fitness(v, s, 1e-6);
      if (f.feasible && v.powers_mw[1] >= v.powers_mw[0]) CHECK(f.objective >= r.best_fitness.objective);
    }
  }
  SUBCASE("infeasible grid reports infeasibility") {
    Scenario strict = s;
    strict.urllc.reliability_floor = 1.0 - 1e-15;
    GridSpec grid;
    grid.power_step_mw = 25.0;
    grid.max_transmissions = 1;
    grid.min_blocklength = 60;
    grid.max_blocklength = 62;
    const OptimizationResult r = exhaustive_baseline(strict, grid);
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(r.report.ok());
  }
}

TEST_CASE("without a jammer and loose targets the GA shortens the block") {
  Scenario s = base();
  s.jammer.mode = JammerMode::None;
  s.urllc.reliability_floor = 0.9;
  s.urllc.delay_ceiling_s = 1.0;
  const OptimizationResult r = solve(s, quick(3));
  REQUIRE(r.feasible);
  CHECK(r.best.blocklength < 80);
  CHECK(r.best.transmissions <= 2);
}

TEST_CASE("GA beats random search at an equal evaluation budget") {
  const Scenario s = base();
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const OptimizationResult ga = solve(s, quick(seed));
    GaSettings rs = quick(seed);
    const OptimizationResult random = random_search(s, rs, ga.evaluations);
    if (!ranks_before(random.best_fitness, ga.best_fitness)) ++wins;
  }
  CHECK(wins >= 4);
}

TEST_CASE("invalid GA settings are rejected") {
  GaSettings g = quick(1);
  g.population_size = 1;
  CHECK_THROWS_AS(solve(base(), g), ConfigError);
  g = quick(1);
  g.crossover_fraction = 1.5;
  CHECK_THROWS_AS(solve(base(), g), ConfigError);
}
