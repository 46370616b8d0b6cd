#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nomajam/metrics.hpp>
#include <nomajam/scenario.hpp>

namespace nomajam::cli {

enum class SweepVariable { Power, Blocklength, Transmissions, JammerPower, ArrivalRate };

/// One swept variable with its values. Powers are in mW, rates in packets/s.
struct SweepAxis {
  SweepVariable variable = SweepVariable::Blocklength;
  std::size_t ue = 0;  // zero-based, Power only
  std::string name;
  std::vector<double> values;
};

/// Parses "n_b=40:160:1" (inclusive range) or "L=1,2,5" (list). Variable names:
/// P1..P<N_c> (also P_1), n_b, L, P_J, lambda. Throws ConfigError.
SweepAxis parse_axis(std::string_view text);

/// Throws ConfigError when an axis does not fit the scenario (P3 in a
/// two-UE cluster, fractional n_b, ...).
void check_axes(const Scenario& scenario, std::span<const SweepAxis> axes);

void apply_axis_value(Scenario& scenario, const SweepAxis& axis, double value);

/// Column names shared by eval and sweep. Depends only on the cluster size.
std::vector<std::string> point_header(std::size_t ues);

/// Flags and metrics of one operating point, formatted for CSV.
std::vector<std::string> point_row(std::size_t index, const Scenario& scenario,
                                   const LinkMetrics& metrics);

/// Cartesian product of the axes, first axis outermost. Rows are written in
/// grid order whatever the thread count. Returns the number of rows.
std::size_t run_sweep(const Scenario& base, std::span<const SweepAxis> axes, std::ostream& csv,
                      int threads);

}  // namespace nomajam::cli
