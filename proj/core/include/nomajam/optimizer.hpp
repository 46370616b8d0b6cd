#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nomajam/ga_settings.hpp"
#include "nomajam/metrics.hpp"
#include "nomajam/scenario.hpp"

namespace nomajam {

/// One candidate (P, L, n_b) of the effective-sum-rate maximization.
struct DecisionVector {
  std::vector<double> powers_mw;
  int transmissions = 1;  // L
  int blocklength = 1;    // n_b

  bool operator==(const DecisionVector&) const = default;
};

enum class Constraint {
  Reliability,    // R_m >= delta_r
  Delay,          // D_m <= delta_d
  PositivePower,  // P_m > 0
  SicOrder,       // P_m <= P_{m+1}
  PowerBudget,    // sum P_m <= P_max
  Integrality,    // n_b, L >= 1
};

std::string_view to_string(Constraint c);

/// A violated constraint with its signed margin in natural units (probability,
/// seconds, mW, count). Negative margins mean the constraint is broken.
struct Violation {
  Constraint constraint;
  std::size_t ue = 0;  // zero-based; for pairwise SIC order, the lower index
  double margin = 0.0;
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  /// Normalized sum used to rank infeasible candidates; 0 when feasible.
  double aggregate_violation = 0.0;
  bool ok() const { return violations.empty(); }
};

/// Copy of `scenario` with the decision variables substituted.
Scenario apply_decision(const Scenario& scenario, const DecisionVector& v);

/// Checks every constraint at `v`. `tolerance` is relative to each
/// constraint's scale (allowed outage 1 - delta_r, delta_d, P_max), so a
/// margin above -tolerance * scale counts as satisfied. Queue instability is a
/// delay violation with margin -inf.
FeasibilityReport feasible(const DecisionVector& v, const Scenario& scenario, double tolerance);

/// Objective (-ESR) plus feasibility, the ranking key of the GA.
struct Fitness {
  double objective = 0.0;  // -eta in bit/s; +inf when the queue is unstable
  double violation = 0.0;
  bool feasible = false;
};

Fitness fitness(const DecisionVector& v, const Scenario& scenario, double tolerance);

/// Feasibility-first order: feasible beats infeasible; feasible ones compare
/// by objective, infeasible ones by aggregate violation.
bool ranks_before(const Fitness& a, const Fitness& b);

struct GenerationRecord {
  int generation = 0;
  double best_objective = 0.0;
  double best_violation = 0.0;
  bool best_feasible = false;
};

struct OptimizationResult {
  DecisionVector best;
  Fitness best_fitness;
  double esr_bps = 0.0;
  std::vector<double> reliability;
  std::vector<double> delay_s;
  bool feasible = false;           // re-checked on `best`, not taken from the loop
  FeasibilityReport report;
  std::vector<GenerationRecord> trace;
  int generations_run = 0;
  std::uint64_t evaluations = 0;
};

/// Genetic algorithm on (P, L, n_b). Deterministic for a given rng_seed
/// regardless of thread count. Returns the best-ever individual; `feasible`
/// is false when no feasible individual was found.
OptimizationResult solve(const Scenario& scenario, const GaSettings& settings);

/// Enumeration grid for the brute-force baseline.
struct GridSpec {
  double power_step_mw = 1.0;
  int min_transmissions = 1;
  int max_transmissions = 5;
  int min_blocklength = 40;
  int max_blocklength = 160;
  int threads = 0;
};

/// Best point of the grid under the same ranking as the GA. Powers run over
/// positive multiples of the step, nondecreasing, within P_max.
OptimizationResult exhaustive_baseline(const Scenario& scenario, const GridSpec& grid,
                                       double tolerance = 1e-6);

/// Uniform sampling of the GA search box with the same repair and ranking.
OptimizationResult random_search(const Scenario& scenario, const GaSettings& settings,
                                 std::uint64_t evaluations);

}  // namespace nomajam
