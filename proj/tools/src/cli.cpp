#include "nomajam_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <nomajam/errors.hpp>
#include <nomajam/metrics.hpp>
#include <nomajam/montecarlo.hpp>
#include <nomajam/optimizer.hpp>
#include <nomajam/scenario.hpp>

#include "nomajam_cli/csv.hpp"
#include "nomajam_cli/sweep.hpp"

namespace nomajam::cli {
namespace {

struct GlobalOptions {
  std::string scenario_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  int threads = 0;
};

Scenario load(const GlobalOptions& g) {
  if (g.scenario_path.empty()) {
    // Built-in reference cluster; overrides go through the YAML path so they
    // are validated exactly like a file.
    const std::string text = serialize_scenario(reference_scenario());
    return parse_scenario(text, g.overrides, "<built-in>");
  }
  return load_scenario(g.scenario_path, g.overrides);
}

// Opens --out, or returns nullptr when it was not given.
std::unique_ptr<std::ofstream> open_out(const std::string& path) {
  if (path.empty()) return nullptr;
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) throw ConfigError("cannot open '" + path + "' for writing");
  return file;
}

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "-";
  return fmt::format("{:.{}g}", v, digits);
}

void print_point(std::ostream& out, const Scenario& s, const LinkMetrics& m) {
  std::string powers;
  for (std::size_t i = 0; i < s.tx.noma_powers_w.size(); ++i)
    powers += (i ? ", " : "") + fixed(w_to_mw(s.tx.noma_powers_w[i]), 8);
  fmt::print(out, "P = ({}) mW, n_b = {}, L = {}, n_d = {} bit, jammer {}\n", powers, s.tx.blocklength,
             s.tx.num_transmissions, s.tx.payload_bits, to_string(s.jammer.mode));
  fmt::print(out, "P_d = {}, T_f = {} s\n\n", fixed(m.detection_prob, 10), fixed(m.frame_duration_s, 10));
  fmt::print(out, "{:>3} {:>14} {:>14} {:>14} {:>16} {:>12} {:>8} {:>12} {:>14}\n", "UE", "p", "p^J",
             "P", "R", "1-R", "rho", "D [ms]", "r [bit/s]");
  for (std::size_t i = 0; i < m.ues.size(); ++i) {
    const UeMetrics& u = m.ues[i];
    fmt::print(out, "{:>3} {:>14} {:>14} {:>14} {:>16} {:>12} {:>8} {:>12} {:>14}\n", i + 1,
               fixed(u.success_no_jam, 8), fixed(u.success_jam, 8), fixed(u.success_prob, 8),
               fixed(u.reliability, 12), fixed(u.outage, 4), fixed(u.utilization, 4),
               u.stable ? fixed(u.delay_s * 1e3, 6) : "unstable",
               u.stable ? fixed(u.effective_rate_bps, 8) : "-");
  }
  if (m.stable())
    fmt::print(out, "eta = {} bit/s\n", fixed(m.esr_bps, 10));
  else
    fmt::print(out, "eta undefined: a queue is unstable\n");
}

int cmd_eval(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const Scenario s = load(g);
  const LinkMetrics m = evaluate(s);
  print_point(out, s, m);
  out << '\n';
  write_row(out, point_header(s.ues.size()));
  write_row(out, point_row(0, s, m));
  if (auto file = open_out(g.out_path)) {
    write_row(*file, point_header(s.ues.size()));
    write_row(*file, point_row(0, s, m));
  }
  if (!m.stable()) {
    for (std::size_t i = 0; i < m.ues.size(); ++i)
      if (!m.ues[i].stable)
        fmt::print(err, "error: UE {} queue is unstable (rho = {} >= 1)\n", i + 1, fixed(m.ues[i].utilization, 6));
    return kQueueUnstable;
  }
  return kOk;
}

int cmd_sweep(const GlobalOptions& g, const std::vector<std::string>& vars, std::ostream& out) {
  const Scenario s = load(g);
  std::vector<SweepAxis> axes;
  for (const auto& v : vars) axes.push_back(parse_axis(v));
  if (auto file = open_out(g.out_path)) {
    const std::size_t rows = run_sweep(s, axes, *file, g.threads);
    fmt::print(out, "wrote {} rows to {}\n", rows, g.out_path);
  } else {
    run_sweep(s, axes, out, g.threads);
  }
  return kOk;
}

struct OptimizeOptions {
  bool exhaustive = false;
  double grid_step_mw = 1.0;
  std::string best_path;
};

void print_result(std::ostream& out, std::string_view label, const OptimizationResult& r) {
  std::string powers;
  double total = 0.0;
  for (std::size_t i = 0; i < r.best.powers_mw.size(); ++i) {
    powers += (i ? ", " : "") + fixed(r.best.powers_mw[i], 8);
    total += r.best.powers_mw[i];
  }
  fmt::print(out, "{}: P = ({}) mW (total {}), L = {}, n_b = {}\n", label, powers, fixed(total, 8),
             r.best.transmissions, r.best.blocklength);
  fmt::print(out, "  eta = {} bit/s, feasible = {}\n", fixed(r.esr_bps, 10), r.feasible ? "yes" : "no");
  for (std::size_t i = 0; i < r.reliability.size(); ++i)
    fmt::print(out, "  UE {}: R = {}, D = {} ms\n", i + 1, fixed(r.reliability[i], 12),
               fixed(r.delay_s[i] * 1e3, 6));
  for (const auto& v : r.report.violations)
    fmt::print(out, "  violated: {} (UE {}), margin {}\n", to_string(v.constraint), v.ue + 1, fixed(v.margin, 6));
}

int cmd_optimize(const GlobalOptions& g, const OptimizeOptions& o, std::ostream& out) {
  const Scenario s = load(g);
  GaSettings settings = s.ga;
  if (g.seed) settings.rng_seed = *g.seed;
  if (g.threads) settings.threads = g.threads;

  const OptimizationResult r = solve(s, settings);
  print_result(out, "GA best", r);
  fmt::print(out, "  generations = {}, evaluations = {}, seed = {}\n", r.generations_run, r.evaluations,
             settings.rng_seed);

  if (auto file = open_out(g.out_path)) {
    write_row(*file, {"generation", "best_objective", "best_eta_bps", "best_violation", "best_feasible"});
    for (const auto& t : r.trace)
      write_row(*file, {std::to_string(t.generation), format_number(t.best_objective),
                        format_number(-t.best_objective), format_number(t.best_violation),
                        t.best_feasible ? "1" : "0"});
  }
  if (auto file = open_out(o.best_path)) {
    const Scenario best = apply_decision(s, r.best);
    write_row(*file, point_header(s.ues.size()));
    write_row(*file, point_row(0, best, evaluate(best)));
  }
  if (o.exhaustive) {
    GridSpec grid;
    grid.power_step_mw = o.grid_step_mw;
    grid.threads = g.threads;
    const OptimizationResult ex = exhaustive_baseline(s, grid, settings.constraint_tolerance);
    print_result(out, "grid best", ex);
    if (ex.feasible && ex.esr_bps > 0.0)
      fmt::print(out, "GA / grid eta ratio = {}\n", fixed(r.esr_bps / ex.esr_bps, 6));
  }
  return r.feasible ? kOk : kInfeasible;
}

struct ValidateOptions {
  std::uint64_t trials = 100'000;
  std::uint64_t arrivals = 1'000'000;
  std::string fading = "mean";
  std::string detection = "independent";
  bool informational = false;
};

struct Check {
  std::string name;
  double analytic;
  McEstimate mc;
};

double z_score(const Check& c) {
  const double diff = c.mc.mean - c.analytic;
  if (c.mc.std_err > 0.0) return diff / c.mc.std_err;
  return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
}

int cmd_validate(const GlobalOptions& g, const ValidateOptions& o, std::ostream& out) {
  const Scenario s = load(g);
  McConfig cfg;
  cfg.trials = o.trials;
  cfg.arrivals = o.arrivals;
  cfg.rng_seed = g.seed.value_or(1);
  cfg.threads = g.threads;
  if (o.fading == "rayleigh") cfg.fading = FadingMode::PerReplicaRayleigh;
  if (o.detection == "sticky") cfg.detection = DetectionMode::Sticky;

  const LinkMetrics m = evaluate(s);
  std::vector<Check> checks;
  std::vector<std::string> skipped;
  for (std::size_t ue = 0; ue < s.ues.size(); ++ue) {
    const std::string tag = std::to_string(ue + 1);
    checks.push_back({"success_" + tag, m.ues[ue].success_prob, mc_success_prob(s, ue, cfg)});
    checks.push_back({"R_" + tag, m.ues[ue].reliability, mc_reliability(s, ue, cfg)});
    if (m.ues[ue].stable)
      checks.push_back({"D_" + tag, m.ues[ue].delay_s, mc_delay(s, ue, cfg)});
    else
      skipped.push_back("D_" + tag);
  }

  fmt::print(out, "Monte Carlo check: trials = {}, arrivals = {}, fading = {}, detection = {}, seed = {}\n",
             o.trials, o.arrivals, o.fading, o.detection, cfg.rng_seed);
  if (o.trials < 1000)
    fmt::print(out, "note: with fewer than 1000 trials the standard errors are wide and these checks are weak\n");
  fmt::print(out, "{:<12} {:>22} {:>22} {:>12} {:>10} {:>6}\n", "metric", "analytic", "monte carlo", "std_err",
             "z", "");
  bool all_pass = true;
  for (const auto& c : checks) {
    const double z = z_score(c);
    const bool pass = std::abs(z) <= 3.0;
    all_pass = all_pass && pass;
    fmt::print(out, "{:<12} {:>22.15g} {:>22.15g} {:>12.4g} {:>10.3g} {:>6}\n", c.name, c.analytic, c.mc.mean,
               c.mc.std_err, z, pass ? "PASS" : "FAIL");
  }
  for (const auto& name : skipped) fmt::print(out, "{:<12} skipped: queue unstable\n", name);
  if (!all_pass && o.informational) fmt::print(out, "discrepancies reported for information only\n");
  return all_pass || o.informational ? kOk : kValidationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Link-level metrics and ESR optimization for jammed NOMA downlinks", "nomajam"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--scenario", g.scenario_path, "Scenario YAML file (default: built-in reference cluster)")
      ->check(CLI::ExistingFile);
  app.add_option("--set", g.overrides, "Override a scenario key, section.key=value (repeatable)")
      ->allow_extra_args(false);
  app.add_option("--seed", g.seed, "RNG seed for optimize and validate");
  app.add_option("--out", g.out_path, "Output CSV path");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  auto* eval = app.add_subcommand("eval", "Evaluate all metrics at the scenario's operating point");

  std::vector<std::string> vars;
  auto* sweep = app.add_subcommand("sweep", "Evaluate metrics over a grid of one or more variables");
  sweep->add_option("--var", vars, "name=start:stop:step or name=a,b,c; repeat to stack axes")
      ->required()
      ->allow_extra_args(false);

  OptimizeOptions opt;
  auto* optimize = app.add_subcommand("optimize", "Maximize the effective sum rate with the GA");
  optimize->add_flag("--exhaustive", opt.exhaustive, "Also run the brute-force grid baseline");
  optimize->add_option("--grid-step", opt.grid_step_mw, "Grid power step in mW for --exhaustive")
      ->check(CLI::PositiveNumber);
  optimize->add_option("--best-out", opt.best_path, "CSV with the metrics of the best point");

  ValidateOptions val;
  auto* validate = app.add_subcommand("validate", "Compare analytic metrics with Monte Carlo estimates");
  validate->add_option("--trials", val.trials, "Trials per probability estimate")->check(CLI::PositiveNumber);
  validate->add_option("--arrivals", val.arrivals, "Arrivals in the queue simulation")->check(CLI::PositiveNumber);
  validate->add_option("--fading", val.fading, "Fading model")->check(CLI::IsMember({"mean", "rayleigh"}));
  validate->add_option("--detection", val.detection, "Jammer decision model")
      ->check(CLI::IsMember({"independent", "sticky"}));
  validate->add_flag("--informational", val.informational, "Report discrepancies without failing");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (eval->parsed()) return cmd_eval(g, out, err);
    if (sweep->parsed()) return cmd_sweep(g, vars, out);
    if (optimize->parsed()) return cmd_optimize(g, opt, out);
    if (validate->parsed()) return cmd_validate(g, val, out);
  } catch (const QueueUnstableError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kQueueUnstable;
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kConfigError;
  } catch (const PreconditionError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kConfigError;
  } catch (const BracketError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    fmt::print(err, "internal error: {}\n", e.what());
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace nomajam::cli
