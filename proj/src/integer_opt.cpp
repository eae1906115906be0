#include "eemimo/integer_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eemimo/error.hpp"
#include "eemimo/parallel.hpp"

namespace eemimo {
namespace {

// Largest M stored exactly in a double; beyond it floor/ceil are meaningless.
constexpr double kMaxExactM = 9007199254740992.0;  // 2^53
// Hard stop for the K loop when no feasible point has been found yet.
constexpr std::int64_t kMaxEnumeratedK = 100'000'000;
constexpr std::int64_t kWaveChunk = 256;

}  // namespace

std::optional<PerUserCount> best_m_for_k(const SystemParams& theta,
                                         std::int64_t k, Detector det) {
  double m_real = 0.0;
  try {
    m_real = optimal_m(theta, static_cast<double>(k), det);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::out_of_range) return std::nullopt;
    throw;
  }
  if (m_real >= kMaxExactM) return std::nullopt;

  std::optional<PerUserCount> best;
  const double lo = std::floor(m_real);
  for (double m : {lo, lo + 1.0}) {
    if (m < 1.0) continue;
    const auto cfg =
        AntennaConfig::integral(static_cast<std::int64_t>(m), k);
    if (!is_feasible(cfg, theta.rate, det)) continue;
    try {
      const EfficiencyReport rep = evaluate(cfg, theta, det);
      if (!best || rep.total_power < best->report.total_power) {
        best = PerUserCount{static_cast<std::int64_t>(m), rep};
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::infeasible &&
          e.kind() != ErrorKind::out_of_range) {
        throw;
      }
    }
  }
  return best;
}

double tail_lower_bound(const SystemParams& theta, std::int64_t k,
                        Detector det) {
  // MRC needs M > 1, ZF needs M > K; the PA term is strictly positive.
  const double kk = static_cast<double>(k);
  if (det == Detector::mrc) {
    return kk * theta.rho_d + theta.rho_r + theta.rho_s;
  }
  return kk * (theta.rho_d + theta.rho_r) + theta.rho_r + theta.rho_s;
}

Optimum optimize_exact(const SystemParams& theta, Detector det,
                       const ExactOptions& opts) {
  validate(theta);
  if (!(theta.rho_r > 0.0)) {
    throw Error(ErrorKind::invalid_input,
                "rho_r must be > 0 for a finite optimal M");
  }
  if (opts.k_max && *opts.k_max < 1) {
    throw Error(ErrorKind::invalid_input, "k_max must be >= 1");
  }
  const double slope =
      det == Detector::mrc ? theta.rho_d : theta.rho_d + theta.rho_r;
  if (!(slope > 0.0) && !opts.k_max) {
    throw Error(ErrorKind::unbounded,
                "optimum may lie at K -> inf; supply an explicit k_max");
  }
  const std::int64_t k_limit = opts.k_max.value_or(kMaxEnumeratedK);

  Optimum out;
  out.detector = det;
  out.k_first = 1;
  bool have_best = false;

  // Candidates for a wave of K values are computed in parallel, then
  // replayed serially in K order so pruning and tie-breaking are exactly
  // those of the single-threaded loop.
  const std::int64_t wave =
      opts.threads > 1 ? kWaveChunk * static_cast<std::int64_t>(opts.threads)
                       : 1;
  std::vector<std::optional<PerUserCount>> results;
  bool done = false;
  for (std::int64_t k0 = 1; !done && k0 <= k_limit; k0 += wave) {
    const std::int64_t count = std::min(wave, k_limit - k0 + 1);
    results.assign(static_cast<std::size_t>(count), std::nullopt);
    parallel_for(static_cast<std::size_t>(count), opts.threads,
                 [&](std::size_t i) {
                   const std::int64_t k = k0 + static_cast<std::int64_t>(i);
                   if (have_best &&
                       tail_lower_bound(theta, k, det) >= out.objective) {
                     return;
                   }
                   results[i] = best_m_for_k(theta, k, det);
                 });
    for (std::int64_t i = 0; i < count; ++i) {
      const std::int64_t k = k0 + i;
      if (have_best && tail_lower_bound(theta, k, det) >= out.objective) {
        out.pruned_at = k;
        done = true;
        break;
      }
      out.k_last = k;
      const auto& cand = results[static_cast<std::size_t>(i)];
      if (cand && (!have_best || cand->report.total_power < out.objective)) {
        have_best = true;
        out.m_star = cand->m;
        out.k_star = k;
        out.objective = cand->report.total_power;
        out.zeta_star = cand->report.zeta;
        out.report = cand->report;
      }
    }
  }

  if (!have_best) {
    throw Error(ErrorKind::infeasible,
                "no feasible (M, K) achieves the demanded rate within bounds");
  }
  return out;
}

std::vector<TracePoint> optimal_pair_trace(const SystemParams& base,
                                           std::span<const double> rates,
                                           Detector det,
                                           const ExactOptions& opts) {
  if (rates.empty()) {
    throw Error(ErrorKind::invalid_input, "rate sweep is empty");
  }
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] > 0.0) || (i > 0 && !(rates[i] > rates[i - 1]))) {
      throw Error(ErrorKind::invalid_input,
                  "rate sweep must be positive and strictly increasing");
    }
  }
  std::vector<TracePoint> trace(rates.size());
  ExactOptions inner = opts;
  inner.threads = 1;
  RelaxOptions relax;
  if (opts.k_max) relax.k_max = static_cast<double>(*opts.k_max);
  parallel_for(rates.size(), opts.threads, [&](std::size_t i) {
    const SystemParams theta = base.with_rate(rates[i]);
    TracePoint& pt = trace[i];
    pt.rate = rates[i];
    pt.exact = optimize_exact(theta, det, inner);
    pt.relaxed = minimize_relaxed(theta, det, relax);
    pt.ratio = pt.exact.zeta_star / pt.relaxed.zeta;
  });
  return trace;
}

}  // namespace eemimo
