#include "eemimo/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "eemimo/efficiency.hpp"
#include "eemimo/error.hpp"
#include "eemimo/parallel.hpp"

namespace eemimo {
namespace {

void check_spec(const TrajectorySpec& spec) {
  if (!(std::isfinite(spec.c) && spec.c > 0.0)) {
    throw Error(ErrorKind::invalid_input,
                "per-user spectral efficiency c must be finite and > 0");
  }
}

void check_rates(std::span<const double> rates) {
  if (rates.empty()) {
    throw Error(ErrorKind::invalid_input, "rate sweep is empty");
  }
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] > 0.0) || (i > 0 && !(rates[i] > rates[i - 1]))) {
      throw Error(ErrorKind::invalid_input,
                  "rate sweep must be positive and strictly increasing");
    }
  }
}

}  // namespace

double trajectory_zeta(const TrajectorySpec& spec, double rate) {
  check_spec(spec);
  if (!(std::isfinite(rate) && rate > 0.0)) {
    throw Error(ErrorKind::invalid_input, "rate must be finite and > 0");
  }
  const SystemParams& t = spec.theta_base;
  const double c = spec.c;
  const double cm1 = pow2_minus_one(c);
  const double denom = 2.0 * std::sqrt(t.alpha * t.rho_r / rate * cm1 / c) +
                       t.rho_r / rate + t.rho_s / rate + t.rho_d / c +
                       t.rho_r * (1.0 / c - 1.0 / rate) * cm1;
  return 1.0 / denom;
}

TrajectoryPoint trajectory_point(const TrajectorySpec& spec, double rate) {
  check_spec(spec);
  if (!(std::isfinite(rate) && rate > spec.c)) {
    throw Error(ErrorKind::invalid_input,
                "trajectory requires R > c so that K = R/c exceeds 1");
  }
  const SystemParams theta = spec.theta_base.with_rate(rate);
  TrajectoryPoint pt;
  pt.rate = rate;
  pt.k_tilde = rate / spec.c;
  pt.m_tilde = optimal_m(theta, pt.k_tilde, Detector::mrc);
  pt.zeta = trajectory_zeta(spec, rate);

  const double direct =
      evaluate(AntennaConfig::relaxed(pt.m_tilde, pt.k_tilde), theta,
               Detector::mrc)
          .zeta;
  if (std::abs(direct - pt.zeta) > 1e-9 * pt.zeta) {
    throw Error(ErrorKind::inconsistent,
                "closed-form trajectory efficiency disagrees with direct "
                "evaluation");
  }
  return pt;
}

double trajectory_limit(const TrajectorySpec& spec) {
  check_spec(spec);
  const SystemParams& t = spec.theta_base;
  const double denom = t.rho_d + t.rho_r * pow2_minus_one(spec.c);
  if (!(denom > 0.0)) {
    throw Error(ErrorKind::invalid_input,
                "trajectory limit needs rho_d + rho_r (2^c - 1) > 0");
  }
  return spec.c / denom;
}

Thresholds thresholds(const SystemParams& theta) {
  if (!(std::isfinite(theta.rho_r) && theta.rho_r > 0.0)) {
    throw Error(ErrorKind::invalid_input, "thresholds require rho_r > 0");
  }
  if (!(std::isfinite(theta.alpha) && theta.alpha > 1.0)) {
    throw Error(ErrorKind::invalid_input, "thresholds require alpha > 1");
  }
  if (!(std::isfinite(theta.rho_d) && theta.rho_d >= 0.0)) {
    throw Error(ErrorKind::invalid_input, "rho_d must be finite and >= 0");
  }
  const double a = theta.alpha;
  const double rr = theta.rho_r;
  const double rd = theta.rho_d;
  Thresholds th;
  th.r1 = std::max(4.0, 4.0 * std::log2(1.0 + a / rr));
  th.r2 = std::max(std::log2(1.0 + 9.0 * rd * rd / (a * rr)),
                   2.0 * std::log2(49.0 * rr / a));
  return th;
}

MrcBoundReport mrc_upper_bound_report(const SystemParams& theta,
                                      const RelaxOptions& opts) {
  validate(theta);
  MrcBoundReport rep;
  rep.th = thresholds(theta);
  if (!(theta.rate > rep.th.max())) {
    throw Error(ErrorKind::hypotheses_unmet,
                "threshold condition unmet: R must exceed max(R1, R2)");
  }
  rep.zeta_mrc = minimize_relaxed(theta, Detector::mrc, opts).zeta;
  rep.zeta_zf = minimize_relaxed(theta, Detector::zf, opts).zeta;
  const double circuit =
      theta.rho_d + theta.rho_r / theta.rate + theta.rho_s / theta.rate;
  rep.bound = 1.0 / std::min(1.0 / rep.zeta_zf, circuit);
  rep.holds = rep.zeta_mrc < rep.bound;
  return rep;
}

bool mrc_upper_bound_check(const SystemParams& theta,
                           const RelaxOptions& opts) {
  return mrc_upper_bound_report(theta, opts).holds;
}

std::vector<DetectorComparison> zf_vs_mrc_compare(const SystemParams& base,
                                                  std::span<const double> rates,
                                                  const RelaxOptions& opts) {
  check_rates(rates);
  std::vector<DetectorComparison> out(rates.size());
  RelaxOptions inner = opts;
  inner.threads = 1;
  parallel_for(rates.size(), opts.threads, [&](std::size_t i) {
    const SystemParams theta = base.with_rate(rates[i]);
    DetectorComparison& row = out[i];
    row.rate = rates[i];
    row.zeta_mrc = minimize_relaxed(theta, Detector::mrc, inner).zeta;
    row.zeta_zf = minimize_relaxed(theta, Detector::zf, inner).zeta;
    row.mrc_less = row.zeta_mrc < row.zeta_zf;
  });
  return out;
}

}  // namespace eemimo
