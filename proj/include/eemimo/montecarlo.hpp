#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "eemimo/link_model.hpp"

namespace eemimo {

/// SplitMix64 (Steele, Lea, Flood). Tiny, full-period, and cheap to seed
/// from a hashed key, which is all the substream scheme below needs.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in (0, 1].
  double open_unit() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
  /// Uniform in [0, 1).
  double half_open_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Seed of the independent stream for one (trial, user, attempt).
std::uint64_t substream_key(std::uint64_t seed, std::uint64_t trial,
                            std::uint64_t user, std::uint64_t attempt);

/// One CN(0,1) sample by Box-Muller, variance 1/2 per real component.
std::complex<double> complex_gaussian(SplitMix64& rng);

/// M x K i.i.d. CN(0,1) channel for a given trial; column k is drawn from
/// its own substream.
Eigen::MatrixXcd draw_channel(std::uint64_t seed, std::uint64_t trial,
                              std::int64_t m, std::int64_t k,
                              std::uint64_t attempt = 0);

struct McConfig {
  std::int64_t m = 0;
  std::int64_t k = 0;
  double gamma = 0.0;
  std::int64_t trials = 100000;
  std::uint64_t seed = 0;
  Detector detector = Detector::mrc;
};

struct McResult {
  double empirical_rate = 0.0;  // sum over users of E[log2(1 + SINR_k)]
  double ci_halfwidth = 0.0;    // 95 %, normal approximation
  double bound_rate = 0.0;      // closed-form achievable rate
  double margin = 0.0;          // empirical_rate - bound_rate
  std::int64_t resampled_trials = 0;  // ZF trials redrawn for singular Gram
};

/// Throws Error(invalid_input) when the config violates its invariants.
void validate(const McConfig& cfg);

/// Results are bit-identical for any `threads`.
McResult simulate(const McConfig& cfg, unsigned threads = 1);

/// One result per config, identical to calling simulate on each. Configs
/// with equal (m, k, seed, trials) share their channel draws.
std::vector<McResult> bound_gap_sweep(std::span<const McConfig> family,
                                      unsigned threads = 1);

}  // namespace eemimo
