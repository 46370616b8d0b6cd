#include "nomajam/fbl.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nomajam/detection.hpp"
#include "nomajam/errors.hpp"

namespace nomajam {
namespace {

constexpr double kLog2eSquared = std::numbers::log2e * std::numbers::log2e;

void check_code(const CodeSpec& code) {
  if (code.blocklength < 1) throw PreconditionError("blocklength n_b must be >= 1");
  if (code.payload_bits < 1) throw PreconditionError("payload n_d must be >= 1 bit");
}

// Normal-approximation argument (n_b C - n_d) / sqrt(n_b V). The payload is an
// exact integer, so the subtraction carries no extra rounding near C = n_d/n_b.
// Returns NaN when V underflowed and the caller must take the limit instead.
double normal_argument(double sinr, const CodeSpec& code, DispersionModel model, double& excess) {
  const double nb = code.blocklength;
  excess = nb * capacity(sinr) - static_cast<double>(code.payload_bits);
  const double v = dispersion(sinr, model);
  if (!(v > 0.0) || !std::isnormal(nb * v)) return std::numeric_limits<double>::quiet_NaN();
  return excess / std::sqrt(nb * v);
}

}  // namespace

double capacity(double sinr) {
  if (sinr < 0.0) throw PreconditionError("capacity: SINR must be >= 0");
  return std::log1p(sinr) * std::numbers::log2e;
}

double dispersion(double sinr, DispersionModel model) {
  if (sinr < 0.0) throw PreconditionError("dispersion: SINR must be >= 0");
  if (sinr == 0.0) return 0.0;
  double factor = 0.0;
  if (model == DispersionModel::AsPrinted) {
    // 1 - 1/(1+g^2), rearranged to stay accurate at both ends.
    factor = sinr < 1.0 ? (sinr * sinr) / (1.0 + sinr * sinr) : 1.0 / (1.0 + 1.0 / (sinr * sinr));
  } else {
    const double inv = 1.0 / (1.0 + sinr);
    factor = sinr < 1.0 ? sinr * (sinr + 2.0) * inv * inv : 1.0 - inv * inv;
  }
  return factor * kLog2eSquared;
}

double bler(double sinr, const CodeSpec& code, DispersionModel model) {
  check_code(code);
  if (sinr < 0.0) throw PreconditionError("bler: SINR must be >= 0");
  if (sinr == 0.0) return 1.0;
  double excess = 0.0;
  const double arg = normal_argument(sinr, code, model, excess);
  if (std::isnan(arg)) return excess > 0.0 ? 0.0 : (excess < 0.0 ? 1.0 : 0.5);
  return q_function(arg);
}

double decode_success_prob(double sinr, const CodeSpec& code, DispersionModel model) {
  check_code(code);
  if (sinr < 0.0) throw PreconditionError("decode_success_prob: SINR must be >= 0");
  if (sinr == 0.0) return 0.0;
  double excess = 0.0;
  const double arg = normal_argument(sinr, code, model, excess);
  if (std::isnan(arg)) return excess > 0.0 ? 1.0 : (excess < 0.0 ? 0.0 : 0.5);
  return q_function(-arg);
}

}  // namespace nomajam
