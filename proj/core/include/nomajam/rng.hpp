#pragma once

#include <cstdint>
#include <random>

namespace nomajam {

using Rng = std::mt19937_64;

/// Independent stream derived from (seed, stream, substream). Used wherever work
/// is split so results do not depend on scheduling or thread count.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32),
                    0x6e6f6d61u};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace nomajam
