#include "nomajam_cli/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include <nomajam/detection.hpp>
#include <nomajam/errors.hpp>

#include "nomajam_cli/csv.hpp"

namespace nomajam::cli {
namespace {

constexpr std::size_t kMaxSweepPoints = 10'000'000;

double parse_double(std::string_view text, std::string_view context) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
    throw ConfigError("sweep '" + std::string(context) + "': '" + std::string(text) +
                      "' is not a number");
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = text.find(sep, start);
    parts.push_back(text.substr(start, end - start));
    if (end == std::string_view::npos) return parts;
    start = end + 1;
  }
}

bool is_integral(double v) { return std::floor(v) == v; }

std::string flag(bool b) { return b ? "1" : "0"; }

std::string fmt_index(std::string_view prefix, std::size_t index, std::string_view suffix) {
  return std::string(prefix) + std::to_string(index) + std::string(suffix);
}

}  // namespace

SweepAxis parse_axis(std::string_view text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("sweep '" + std::string(text) + "' must look like name=start:stop:step or name=a,b,c");
  SweepAxis axis;
  axis.name = std::string(text.substr(0, eq));
  const std::string_view spec = text.substr(eq + 1);

  const std::string& n = axis.name;
  if (n == "n_b") {
    axis.variable = SweepVariable::Blocklength;
  } else if (n == "L") {
    axis.variable = SweepVariable::Transmissions;
  } else if (n == "P_J") {
    axis.variable = SweepVariable::JammerPower;
  } else if (n == "lambda") {
    axis.variable = SweepVariable::ArrivalRate;
  } else if (n.size() > 1 && n[0] == 'P') {
    std::string_view digits = std::string_view(n).substr(n[1] == '_' ? 2 : 1);
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || k == 0)
      throw ConfigError("unknown sweep variable '" + n + "'");
    axis.variable = SweepVariable::Power;
    axis.ue = k - 1;
  } else {
    throw ConfigError("unknown sweep variable '" + n + "' (expected P1, P2, n_b, L, P_J or lambda)");
  }

  if (spec.find(':') != std::string_view::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw ConfigError("sweep '" + n + "': range needs start:stop:step");
    const double start = parse_double(parts[0], n);
    const double stop = parse_double(parts[1], n);
    const double step = parse_double(parts[2], n);
    if (!(step > 0.0)) throw ConfigError("sweep '" + n + "': step must be > 0");
    if (stop < start) throw ConfigError("sweep '" + n + "': range is empty (stop < start)");
    const double count = std::floor((stop - start) / step * (1.0 + 1e-12) + 1e-9) + 1.0;
    if (count > static_cast<double>(kMaxSweepPoints)) throw ConfigError("sweep '" + n + "': too many points");
    for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i)
      axis.values.push_back(start + static_cast<double>(i) * step);
  } else {
    for (const auto part : split(spec, ',')) axis.values.push_back(parse_double(part, n));
  }
  return axis;
}

void check_axes(const Scenario& s, std::span<const SweepAxis> axes) {
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const SweepAxis& a = axes[i];
    for (std::size_t j = 0; j < i; ++j)
      if (axes[j].variable == a.variable && axes[j].ue == a.ue)
        throw ConfigError("sweep variable '" + a.name + "' given twice");
    if (a.values.empty()) throw ConfigError("sweep '" + a.name + "' has no values");
    for (const double v : a.values) {
      switch (a.variable) {
        case SweepVariable::Power:
          if (a.ue >= s.ues.size())
            throw ConfigError("sweep '" + a.name + "': the cluster has only " +
                              std::to_string(s.ues.size()) + " UEs");
          if (v < 0.0) throw ConfigError("sweep '" + a.name + "': powers must be >= 0");
          break;
        case SweepVariable::Blocklength:
        case SweepVariable::Transmissions:
          if (!is_integral(v) || v < 1.0 || v > 1e9)
            throw ConfigError("sweep '" + a.name + "': values must be integers >= 1");
          break;
        case SweepVariable::JammerPower:
        case SweepVariable::ArrivalRate:
          if (v < 0.0) throw ConfigError("sweep '" + a.name + "': values must be >= 0");
          break;
      }
    }
  }
}

void apply_axis_value(Scenario& s, const SweepAxis& axis, double value) {
  switch (axis.variable) {
    case SweepVariable::Power:
      s.tx.noma_powers_w.at(axis.ue) = mw_to_w(value);
      break;
    case SweepVariable::Blocklength:
      s.tx.blocklength = static_cast<int>(value);
      break;
    case SweepVariable::Transmissions:
      s.tx.num_transmissions = static_cast<int>(value);
      break;
    case SweepVariable::JammerPower:
      s.jammer.tx_power_w = mw_to_w(value);
      break;
    case SweepVariable::ArrivalRate:
      for (auto& ue : s.ues) ue.arrival_rate_pps = value;
      break;
  }
}

std::vector<std::string> point_header(std::size_t ues) {
  std::vector<std::string> h{"point"};
  for (std::size_t m = 1; m <= ues; ++m) h.push_back(fmt_index("P_", m, "_mW"));
  h.insert(h.end(), {"P_total_mW", "n_b", "L", "P_J_mW", "mode", "P_d", "T_f_s"});
  for (std::size_t m = 1; m <= ues; ++m) {
    for (const char* col : {"lambda_", "success_nojam_", "success_jam_", "success_", "R_", "outage_",
                            "rho_"})
      h.push_back(fmt_index(col, m, ""));
    h.push_back(fmt_index("D_", m, "_s"));
    h.push_back(fmt_index("r_", m, "_bps"));
  }
  h.insert(h.end(), {"eta_bps", "stable", "sic_ok", "budget_ok", "reliability_ok", "delay_ok", "feasible"});
  return h;
}

std::vector<std::string> point_row(std::size_t index, const Scenario& s, const LinkMetrics& m) {
  std::vector<std::string> row{std::to_string(index)};
  bool sic_ok = true;
  double total_w = 0.0;
  double total_mw = 0.0;
  for (std::size_t i = 0; i < s.tx.noma_powers_w.size(); ++i) {
    const double p = s.tx.noma_powers_w[i];
    row.push_back(format_number(w_to_mw(p)));
    total_w += p;
    total_mw += w_to_mw(p);
    if (!(p > 0.0) || (i > 0 && p < s.tx.noma_powers_w[i - 1])) sic_ok = false;
  }
  const bool budget_ok = total_w <= s.tx.max_total_power_w * (1.0 + 1e-12);
  row.push_back(format_number(total_mw));
  row.push_back(std::to_string(s.tx.blocklength));
  row.push_back(std::to_string(s.tx.num_transmissions));
  row.push_back(format_number(w_to_mw(s.jammer.tx_power_w)));
  row.push_back(std::string(to_string(s.jammer.mode)));
  row.push_back(format_number(m.detection_prob));
  row.push_back(format_number(m.frame_duration_s));

  const double allowed_outage = 1.0 - s.urllc.reliability_floor;
  bool reliability_ok = true;
  bool delay_ok = true;
  for (std::size_t i = 0; i < m.ues.size(); ++i) {
    const UeMetrics& u = m.ues[i];
    row.push_back(format_number(s.ues[i].arrival_rate_pps));
    row.push_back(format_number(u.success_no_jam));
    row.push_back(format_number(u.success_jam));
    row.push_back(format_number(u.success_prob));
    row.push_back(format_number(u.reliability));
    row.push_back(format_number(u.outage));
    row.push_back(format_number(u.utilization));
    row.push_back(u.stable ? format_number(u.delay_s) : std::string{});
    row.push_back(u.stable ? format_number(u.effective_rate_bps) : std::string{});
    reliability_ok = reliability_ok && u.outage <= allowed_outage;
    delay_ok = delay_ok && u.stable && u.delay_s <= s.urllc.delay_ceiling_s;
  }
  const bool stable = m.stable();
  row.push_back(stable ? format_number(m.esr_bps) : std::string{});
  for (const bool f : {stable, sic_ok, budget_ok, reliability_ok, delay_ok,
                       sic_ok && budget_ok && reliability_ok && delay_ok})
    row.push_back(flag(f));
  return row;
}

std::size_t run_sweep(const Scenario& base, std::span<const SweepAxis> axes, std::ostream& csv,
                      int threads) {
  if (axes.empty()) throw ConfigError("sweep needs at least one --var");
  check_axes(base, axes);

  std::size_t total = 1;
  for (const auto& a : axes) {
    total *= a.values.size();
    if (total > kMaxSweepPoints) throw ConfigError("sweep grid exceeds " + std::to_string(kMaxSweepPoints) + " points");
  }

  // Detection depends on the operating point only through the radiated power.
  std::mutex cache_mutex;
  std::map<double, double> pd_cache;
  auto detection_for = [&](const Scenario& s) {
    const double pt = s.tx.total_power_w();
    {
      std::scoped_lock lock(cache_mutex);
      if (auto it = pd_cache.find(pt); it != pd_cache.end()) return it->second;
    }
    const double pd = detection_prob(s);
    std::scoped_lock lock(cache_mutex);
    pd_cache.emplace(pt, pd);
    return pd;
  };

  std::vector<std::vector<std::string>> rows(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < total;) {
      try {
        Scenario s = base;
        std::size_t rest = i;
        for (std::size_t k = axes.size(); k-- > 0;) {
          const auto& a = axes[k];
          apply_axis_value(s, a, a.values[rest % a.values.size()]);
          rest /= a.values.size();
        }
        rows[i] = point_row(i, s, evaluate(s, detection_for(s)));
      } catch (...) {
        std::scoped_lock lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t count =
      std::min<std::size_t>(total, threads > 0 ? static_cast<std::size_t>(threads) : hw);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  write_row(csv, point_header(base.ues.size()));
  for (const auto& row : rows) write_row(csv, row);
  return total;
}

}  // namespace nomajam::cli
