#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eemimo/efficiency.hpp"
#include "eemimo/relaxation.hpp"

namespace eemimo {

struct ExactOptions {
  std::optional<std::int64_t> k_max;
  unsigned threads = 1;
};

/// Exact integer optimum of the energy efficiency.
struct Optimum {
  std::int64_t m_star = 0;
  std::int64_t k_star = 0;
  double zeta_star = 0.0;
  double objective = 0.0;  // total normalized power at the optimum
  Detector detector = Detector::mrc;
  std::int64_t k_first = 1;  // K range actually enumerated
  std::int64_t k_last = 0;
  std::optional<std::int64_t> pruned_at;  // first K cut by the tail bound
  EfficiencyReport report;
};

/// Best integer M for a fixed integer K: the floor or ceil of the real
/// optimum that is feasible and gives the smaller power (smaller M on ties).
/// Returns nullopt when neither neighbour is feasible or representable.
struct PerUserCount {
  std::int64_t m = 0;
  EfficiencyReport report;
};
std::optional<PerUserCount> best_m_for_k(const SystemParams& theta,
                                         std::int64_t k, Detector det);

/// Power lower bound valid for every K' >= k; increasing in k.
double tail_lower_bound(const SystemParams& theta, std::int64_t k,
                        Detector det);

/// Exact argmin over integer (M, K). Ties go to the smaller K, then the
/// smaller M. Results do not depend on opts.threads.
Optimum optimize_exact(const SystemParams& theta, Detector det,
                       const ExactOptions& opts = {});

struct TracePoint {
  double rate = 0.0;
  Optimum exact;
  RelaxedOptimum relaxed;
  double ratio = 0.0;  // exact zeta / relaxed zeta
};

/// Exact and relaxed optima along an increasing list of sum rates.
std::vector<TracePoint> optimal_pair_trace(const SystemParams& base,
                                           std::span<const double> rates,
                                           Detector det,
                                           const ExactOptions& opts = {});

}  // namespace eemimo
