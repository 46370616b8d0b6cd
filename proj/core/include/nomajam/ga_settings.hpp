#pragma once

#include <cstdint>

namespace nomajam {

/// Genetic algorithm settings. The first block is the reference configuration;
/// the operator knobs after it are this library's own.
struct GaSettings {
  int population_size = 150;
  int max_generations = 200;
  double function_tolerance = 1e-10;
  double constraint_tolerance = 1e-6;  // relative to each constraint's scale
  double crossover_fraction = 0.8;
  int max_stall_generations = 50;
  std::uint64_t rng_seed = 1;

  int elite_count = 2;         // per island
  int tournament_size = 2;
  double mutation_scale = 0.1; // initial power jitter as a fraction of power_range_db
  int islands = 10;
  int migration_interval = 25;
  double power_range_db = 20.0;  // power genes span [P_max - range, P_max] in dB
  int max_transmissions = 8;   // search box for L
  int min_blocklength = 1;     // search box for n_b
  int max_blocklength = 400;
  int threads = 0;             // 0 = hardware concurrency
};

}  // namespace nomajam
