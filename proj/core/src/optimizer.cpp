#include "nomajam/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>

#include "nomajam/detection.hpp"
#include "nomajam/errors.hpp"
#include "nomajam/rng.hpp"
#include "parallel.hpp"

namespace nomajam {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kRandomSearchStream = 0x7261'6e64;

struct Assessment {
  Fitness fit;
  FeasibilityReport report;
  LinkMetrics metrics;
};

void add_violation(FeasibilityReport& r, Constraint c, std::size_t ue, double margin,
                   double normalized) {
  r.violations.push_back(Violation{c, ue, margin});
  r.aggregate_violation += normalized;
}

Assessment assess(const DecisionVector& v, const Scenario& base, double tol,
                  std::optional<double> pd_hint) {
  Assessment a;
  FeasibilityReport& r = a.report;
  const double pmax_mw = w_to_mw(base.tx.max_total_power_w);

  if (v.powers_mw.size() != base.ues.size())
    throw PreconditionError("decision vector needs one power per UE");

  for (std::size_t m = 0; m < v.powers_mw.size(); ++m) {
    if (!(v.powers_mw[m] > 0.0))
      add_violation(r, Constraint::PositivePower, m, v.powers_mw[m], 1.0 - v.powers_mw[m] / pmax_mw);
    if (m + 1 < v.powers_mw.size()) {
      const double margin = v.powers_mw[m + 1] - v.powers_mw[m];
      if (margin < -tol * pmax_mw) add_violation(r, Constraint::SicOrder, m, margin, -margin / pmax_mw);
    }
  }
  const double total_mw = std::accumulate(v.powers_mw.begin(), v.powers_mw.end(), 0.0);
  if (pmax_mw - total_mw < -tol * pmax_mw)
    add_violation(r, Constraint::PowerBudget, 0, pmax_mw - total_mw, (total_mw - pmax_mw) / pmax_mw);

  if (v.blocklength < 1 || v.transmissions < 1) {
    const int worst = std::min(v.blocklength, v.transmissions);
    add_violation(r, Constraint::Integrality, 0, worst - 1.0, 1.0 - worst);
    a.fit = Fitness{kInf, r.aggregate_violation, false};
    return a;
  }

  const Scenario s = apply_decision(base, v);
  a.metrics = pd_hint ? evaluate(s, *pd_hint) : evaluate(s);
  const double floor_gap = 1.0 - s.urllc.reliability_floor;
  for (std::size_t m = 0; m < a.metrics.ues.size(); ++m) {
    const UeMetrics& ue = a.metrics.ues[m];
    const double margin = floor_gap - ue.outage;  // R_m - delta_r without cancellation
    if (margin < -tol * floor_gap) {
      const double shortfall = ue.reliability > 0.0
                                   ? std::log10(ue.outage / floor_gap) - std::log10(ue.reliability)
                                   : 400.0;
      add_violation(r, Constraint::Reliability, m, margin, shortfall);
    }
    if (!ue.stable) {
      add_violation(r, Constraint::Delay, m, -kInf, kInf);
    } else {
      const double delay_margin = s.urllc.delay_ceiling_s - ue.delay_s;
      if (delay_margin < -tol * s.urllc.delay_ceiling_s)
        add_violation(r, Constraint::Delay, m, delay_margin, -delay_margin / s.urllc.delay_ceiling_s);
    }
  }

  a.fit.objective = a.metrics.stable() ? -a.metrics.esr_bps : kInf;
  a.fit.violation = r.aggregate_violation;
  a.fit.feasible = r.ok();
  return a;
}

// Power genes live on a dB scale relative to P_max, spanning
// [min_power_db, 0] dB; integers are bounded by the GA settings.
struct Box {
  double max_power_mw;
  double min_power_db;
  int max_transmissions;
  int min_blocklength;
  int max_blocklength;
};

Box search_box(const Scenario& s, const GaSettings& g) {
  return Box{w_to_mw(s.tx.max_total_power_w), -g.power_range_db, g.max_transmissions,
             g.min_blocklength, g.max_blocklength};
}

double to_db(double power_mw, const Box& box) { return 10.0 * std::log10(power_mw / box.max_power_mw); }
double from_db(double db, const Box& box) { return box.max_power_mw * std::pow(10.0, db / 10.0); }

void repair(DecisionVector& v, const Box& box) {
  const double floor = from_db(box.min_power_db, box);
  for (double& p : v.powers_mw) p = std::isfinite(p) ? std::clamp(p, floor, box.max_power_mw) : floor;
  std::sort(v.powers_mw.begin(), v.powers_mw.end());  // SIC order, total unchanged
  v.transmissions = std::clamp(v.transmissions, 1, box.max_transmissions);
  v.blocklength = std::clamp(v.blocklength, box.min_blocklength, box.max_blocklength);
}

DecisionVector random_individual(std::size_t ues, const Box& box, Rng& rng) {
  DecisionVector v;
  std::uniform_real_distribution<double> level(box.min_power_db, 0.0);
  for (std::size_t m = 0; m < ues; ++m) v.powers_mw.push_back(from_db(level(rng), box));
  v.transmissions = std::uniform_int_distribution<int>(1, box.max_transmissions)(rng);
  v.blocklength = std::uniform_int_distribution<int>(box.min_blocklength, box.max_blocklength)(rng);
  repair(v, box);
  return v;
}

struct Individual {
  DecisionVector genes;
  Fitness fit;
};

std::size_t tournament(const std::vector<Individual>& pop, int size, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
  std::size_t winner = pick(rng);
  for (int k = 1; k < size; ++k) {
    const std::size_t challenger = pick(rng);
    if (ranks_before(pop[challenger].fit, pop[winner].fit)) winner = challenger;
  }
  return winner;
}

// Blend crossover on power levels (x = a + u (b - a) in dB, u in
// [-0.25, 1.25]), uniform crossover on the integer genes.
DecisionVector crossover(const DecisionVector& a, const DecisionVector& b, const Box& box, Rng& rng) {
  DecisionVector child = a;
  std::uniform_real_distribution<double> blend(-0.25, 1.25);
  for (std::size_t m = 0; m < child.powers_mw.size(); ++m) {
    const double da = to_db(a.powers_mw[m], box);
    const double db = to_db(b.powers_mw[m], box);
    child.powers_mw[m] = from_db(da + blend(rng) * (db - da), box);
  }
  if (bernoulli(rng, 0.5)) child.transmissions = b.transmissions;
  if (bernoulli(rng, 0.5)) child.blocklength = b.blocklength;
  return child;
}

int geometric_step(double mean_step, Rng& rng) {
  const double p = 1.0 / std::max(1.0, mean_step);
  const int magnitude = 1 + std::geometric_distribution<int>(p)(rng);
  return bernoulli(rng, 0.5) ? magnitude : -magnitude;
}

// Gaussian perturbation of powers and geometric-step moves of the integers;
// both shrink linearly over the run.
DecisionVector mutate(const DecisionVector& parent, const Box& box, double scale, double shrink, Rng& rng) {
  DecisionVector child = parent;
  std::normal_distribution<double> jitter(0.0, -scale * box.min_power_db * shrink + 1e-3);
  const std::size_t forced = std::uniform_int_distribution<std::size_t>(0, child.powers_mw.size() - 1)(rng);
  for (std::size_t m = 0; m < child.powers_mw.size(); ++m)
    if (m == forced || bernoulli(rng, 0.5))
      child.powers_mw[m] = from_db(to_db(child.powers_mw[m], box) + jitter(rng), box);
  const double nb_range = box.max_blocklength - box.min_blocklength;
  const bool move_l = bernoulli(rng, 0.5);
  const bool move_nb = bernoulli(rng, 0.5) || !move_l;
  if (move_l) child.transmissions += geometric_step(1.0 + 0.25 * box.max_transmissions * shrink, rng);
  if (move_nb) child.blocklength += geometric_step(1.0 + 0.1 * nb_range * shrink, rng);
  return child;
}

OptimizationResult finish(const Scenario& s, const DecisionVector& best, double tol) {
  OptimizationResult out;
  out.best = best;
  const Assessment a = assess(best, s, tol, std::nullopt);
  out.best_fitness = a.fit;
  out.report = a.report;
  out.feasible = a.report.ok();
  out.esr_bps = a.metrics.esr_bps;
  for (const auto& ue : a.metrics.ues) {
    out.reliability.push_back(ue.reliability);
    out.delay_s.push_back(ue.delay_s);
  }
  return out;
}

// Average relative improvement per generation over the stall window.
bool stalled(const GenerationRecord& old, const GenerationRecord& now, int window, double ftol) {
  if (old.best_feasible != now.best_feasible) return false;
  if (now.best_feasible)
    return (old.best_objective - now.best_objective) / std::max(1.0, std::abs(now.best_objective)) / window <=
           ftol;
  return (old.best_violation - now.best_violation) / window <= ftol;
}

}  // namespace

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::Reliability:
      return "reliability";
    case Constraint::Delay:
      return "delay";
    case Constraint::PositivePower:
      return "positive_power";
    case Constraint::SicOrder:
      return "sic_order";
    case Constraint::PowerBudget:
      return "power_budget";
    case Constraint::Integrality:
      return "integrality";
  }
  return "?";
}

Scenario apply_decision(const Scenario& scenario, const DecisionVector& v) {
  Scenario s = scenario;
  s.tx.noma_powers_w.clear();
  for (const double p : v.powers_mw) s.tx.noma_powers_w.push_back(mw_to_w(p));
  s.tx.num_transmissions = v.transmissions;
  s.tx.blocklength = v.blocklength;
  return s;
}

FeasibilityReport feasible(const DecisionVector& v, const Scenario& scenario, double tolerance) {
  return assess(v, scenario, tolerance, std::nullopt).report;
}

Fitness fitness(const DecisionVector& v, const Scenario& scenario, double tolerance) {
  return assess(v, scenario, tolerance, std::nullopt).fit;
}

bool ranks_before(const Fitness& a, const Fitness& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.feasible) return a.objective < b.objective;
  return a.violation < b.violation;
}

OptimizationResult solve(const Scenario& scenario, const GaSettings& settings) {
  {
    Scenario checked = scenario;
    checked.ga = settings;
    validate(checked);
  }
  const Box box = search_box(scenario, settings);
  const double tol = settings.constraint_tolerance;
  const std::size_t pop_size = static_cast<std::size_t>(settings.population_size);
  const std::size_t islands = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, settings.islands)), 1,
                                                      std::max<std::size_t>(1, pop_size / 4));

  // Contiguous island slices [bounds[i], bounds[i+1]).
  std::vector<std::size_t> bounds(islands + 1);
  for (std::size_t i = 0; i <= islands; ++i) bounds[i] = i * pop_size / islands;

  std::uint64_t evaluations = 0;
  auto evaluate = [&](std::vector<Individual>& pop, const std::vector<char>& dirty) {
    detail::parallel_for(pop.size(), settings.threads, [&](std::size_t k) {
      if (dirty[k]) pop[k].fit = assess(pop[k].genes, scenario, tol, std::nullopt).fit;
    });
    evaluations += static_cast<std::uint64_t>(std::count(dirty.begin(), dirty.end(), 1));
  };
  auto by_rank = [](const Individual& a, const Individual& b) { return ranks_before(a.fit, b.fit); };

  std::vector<Individual> pop(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    Rng rng = make_stream(settings.rng_seed, 0, i);
    pop[i].genes = random_individual(scenario.ues.size(), box, rng);
  }
  evaluate(pop, std::vector<char>(pop_size, 1));

  std::vector<GenerationRecord> trace;
  Individual best_ever = pop.front();
  int generation = 0;
  for (;; ++generation) {
    for (std::size_t i = 0; i < islands; ++i)
      std::stable_sort(pop.begin() + static_cast<std::ptrdiff_t>(bounds[i]),
                       pop.begin() + static_cast<std::ptrdiff_t>(bounds[i + 1]), by_rank);
    const auto leader = std::min_element(pop.begin(), pop.end(), by_rank);
    if (generation == 0 || ranks_before(leader->fit, best_ever.fit)) best_ever = *leader;
    trace.push_back(GenerationRecord{generation, best_ever.fit.objective, best_ever.fit.violation,
                                     best_ever.fit.feasible});

    if (generation + 1 >= settings.max_generations) break;
    const int window = settings.max_stall_generations;
    if (generation >= window &&
        stalled(trace[generation - window], trace[generation], window, settings.function_tolerance))
      break;

    // Ring migration: each island's best overwrites the next island's worst.
    if (islands > 1 && settings.migration_interval > 0 && generation > 0 &&
        generation % settings.migration_interval == 0) {
      std::vector<Individual> emigrants;
      for (std::size_t i = 0; i < islands; ++i) emigrants.push_back(pop[bounds[i]]);
      for (std::size_t i = 0; i < islands; ++i) {
        const std::size_t to = (i + 1) % islands;
        pop[bounds[to + 1] - 1] = emigrants[i];
        std::stable_sort(pop.begin() + static_cast<std::ptrdiff_t>(bounds[to]),
                         pop.begin() + static_cast<std::ptrdiff_t>(bounds[to + 1]), by_rank);
      }
    }

    const double shrink = 1.0 - static_cast<double>(generation) / settings.max_generations;
    std::vector<Individual> next(pop_size);
    std::vector<char> dirty(pop_size, 0);
    for (std::size_t i = 0; i < islands; ++i) {
      const std::vector<Individual> island(pop.begin() + static_cast<std::ptrdiff_t>(bounds[i]),
                                           pop.begin() + static_cast<std::ptrdiff_t>(bounds[i + 1]));
      const std::size_t size = island.size();
      const std::size_t elites = std::min<std::size_t>(static_cast<std::size_t>(settings.elite_count), size);
      const std::size_t children = size - elites;
      const auto crossovers =
          static_cast<std::size_t>(std::lround(settings.crossover_fraction * static_cast<double>(children)));
      for (std::size_t k = 0; k < elites; ++k) next[bounds[i] + k] = island[k];
      for (std::size_t k = 0; k < children; ++k) {
        const std::size_t slot = bounds[i] + elites + k;
        Rng rng = make_stream(settings.rng_seed, static_cast<std::uint64_t>(generation) + 1, slot);
        DecisionVector child;
        if (k < crossovers) {
          const auto& a = island[tournament(island, settings.tournament_size, rng)].genes;
          const auto& b = island[tournament(island, settings.tournament_size, rng)].genes;
          child = crossover(a, b, box, rng);
        } else {
          child = mutate(island[tournament(island, settings.tournament_size, rng)].genes, box, settings.mutation_scale, shrink, rng);
        }
        repair(child, box);
        next[slot].genes = std::move(child);
        dirty[slot] = 1;
      }
    }
    evaluate(next, dirty);
    pop = std::move(next);
  }

  OptimizationResult out = finish(scenario, best_ever.genes, tol);
  out.trace = std::move(trace);
  out.generations_run = generation + 1;
  out.evaluations = evaluations;
  return out;
}

OptimizationResult exhaustive_baseline(const Scenario& scenario, const GridSpec& grid,
                                       double tolerance) {
  if (!(grid.power_step_mw > 0.0)) throw PreconditionError("grid power step must be > 0");
  if (grid.min_transmissions < 1 || grid.min_transmissions > grid.max_transmissions ||
      grid.min_blocklength < 1 || grid.min_blocklength > grid.max_blocklength)
    throw PreconditionError("grid ranges must be nonempty with L, n_b >= 1");

  const std::size_t ues = scenario.ues.size();
  const double pmax_mw = w_to_mw(scenario.tx.max_total_power_w);
  const auto max_steps = static_cast<long>(std::floor(pmax_mw / grid.power_step_mw + 1e-9));

  // Nondecreasing step counts with total <= max_steps.
  std::vector<std::vector<long>> power_points;
  std::vector<long> current;
  auto enumerate = [&](auto&& self, long min_step, long remaining) -> void {
    if (current.size() == ues) {
      power_points.push_back(current);
      return;
    }
    const auto left = static_cast<long>(ues - current.size());
    for (long k = min_step; k * left <= remaining; ++k) {
      current.push_back(k);
      self(self, k, remaining - k);
      current.pop_back();
    }
  };
  enumerate(enumerate, 1, max_steps);

  std::map<long, double> pd_cache;
  for (const auto& point : power_points) {
    const long total = std::accumulate(point.begin(), point.end(), 0L);
    if (!pd_cache.contains(total))
      pd_cache[total] = effective_detection_prob(
          scenario.jammer.mode, detection_inputs(scenario, mw_to_w(total * grid.power_step_mw)));
  }

  struct Local {
    DecisionVector genes;
    Fitness fit;
    bool set = false;
  };
  std::vector<Local> best(power_points.size());
  detail::parallel_for(power_points.size(), grid.threads, [&](std::size_t i) {
    const auto& point = power_points[i];
    const long total = std::accumulate(point.begin(), point.end(), 0L);
    const double pd = pd_cache.at(total);
    DecisionVector v;
    for (const long k : point) v.powers_mw.push_back(k * grid.power_step_mw);
    for (int L = grid.min_transmissions; L <= grid.max_transmissions; ++L) {
      for (int nb = grid.min_blocklength; nb <= grid.max_blocklength; ++nb) {
        v.transmissions = L;
        v.blocklength = nb;
        const Fitness f = assess(v, scenario, tolerance, pd).fit;
        if (!best[i].set || ranks_before(f, best[i].fit)) best[i] = Local{v, f, true};
      }
    }
  });

  if (best.empty()) throw PreconditionError("power grid is empty: step exceeds P_max / N_c");
  std::size_t winner = 0;
  for (std::size_t i = 1; i < best.size(); ++i)
    if (ranks_before(best[i].fit, best[winner].fit)) winner = i;

  OptimizationResult out = finish(scenario, best[winner].genes, tolerance);
  out.evaluations = power_points.size() *
                    static_cast<std::uint64_t>(grid.max_transmissions - grid.min_transmissions + 1) *
                    static_cast<std::uint64_t>(grid.max_blocklength - grid.min_blocklength + 1);
  return out;
}

OptimizationResult random_search(const Scenario& scenario, const GaSettings& settings,
                                 std::uint64_t evaluations) {
  if (evaluations < 1) throw PreconditionError("random search needs at least one evaluation");
  const Box box = search_box(scenario, settings);
  std::vector<Individual> samples(evaluations);
  detail::parallel_for(samples.size(), settings.threads, [&](std::size_t i) {
    Rng rng = make_stream(settings.rng_seed, kRandomSearchStream, i);
    samples[i].genes = random_individual(scenario.ues.size(), box, rng);
    samples[i].fit = assess(samples[i].genes, scenario, settings.constraint_tolerance, std::nullopt).fit;
  });
  std::size_t winner = 0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (ranks_before(samples[i].fit, samples[winner].fit)) winner = i;
  OptimizationResult out = finish(scenario, samples[winner].genes, settings.constraint_tolerance);
  out.evaluations = evaluations;
  return out;
}

}  // namespace nomajam
