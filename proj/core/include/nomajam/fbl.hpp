#pragma once

// Finite-blocklength coding quantities under the normal approximation.

namespace nomajam {

/// Which dispersion expression feeds the normal approximation.
///   AsPrinted: (1 - 1/(1 + g^2)) * log2(e)^2
///   Standard:  (1 - 1/(1 + g)^2) * log2(e)^2
enum class DispersionModel { AsPrinted, Standard };

struct CodeSpec {
  int blocklength = 1;   // n_b, channel uses
  int payload_bits = 1;  // n_d, information bits
};

/// log2(1 + sinr), bits per channel use.
double capacity(double sinr);

/// Channel dispersion in (bits per channel use)^2. Zero at sinr = 0.
double dispersion(double sinr, DispersionModel model = DispersionModel::AsPrinted);

/// Block error rate Q(sqrt(n_b / V) * (C - n_d / n_b)).
///
/// Total on sinr >= 0: sinr = 0 gives 1; when V underflows the result is the
/// limit 0, 1/2 or 1 depending on the sign of C - n_d/n_b.
double bler(double sinr, const CodeSpec& code, DispersionModel model = DispersionModel::AsPrinted);

/// 1 - bler, evaluated as the upper Gaussian tail so that values near zero keep
/// full relative precision instead of cancelling against 1.
double decode_success_prob(double sinr, const CodeSpec& code,
                           DispersionModel model = DispersionModel::AsPrinted);

}  // namespace nomajam
