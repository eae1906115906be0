#pragma once

#include <span>
#include <vector>

#include "eemimo/relaxation.hpp"
#include "eemimo/units.hpp"

namespace eemimo {

/// Scaling law K = R / c with M matched optimally: every user keeps the
/// fixed spectral efficiency c while the sum rate R grows.
struct TrajectorySpec {
  double c = 0.0;           // bits/s/Hz per user
  SystemParams theta_base;  // rate field is ignored
};

struct TrajectoryPoint {
  double rate = 0.0;
  double m_tilde = 0.0;
  double k_tilde = 0.0;
  double zeta = 0.0;
};

/// Closed-form efficiency along the trajectory at sum rate `rate`.
double trajectory_zeta(const TrajectorySpec& spec, double rate);

/// Requires rate > c. The closed form is cross-checked against a direct
/// evaluation at (M~, K~); a relative mismatch above 1e-9 throws
/// Error(inconsistent).
TrajectoryPoint trajectory_point(const TrajectorySpec& spec, double rate);

/// c / (rho_d + rho_r (2^c - 1)), the R -> inf limit of trajectory_zeta.
double trajectory_limit(const TrajectorySpec& spec);

struct Thresholds {
  double r1 = 0.0;
  double r2 = 0.0;
  double max() const { return r1 > r2 ? r1 : r2; }
};

/// Sum-rate thresholds above which the MRC relaxation is provably bounded
/// by the ZF relaxation or the per-user circuit power.
Thresholds thresholds(const SystemParams& theta);

struct MrcBoundReport {
  Thresholds th;
  double zeta_mrc = 0.0;  // relaxed MRC optimum
  double zeta_zf = 0.0;   // relaxed ZF optimum
  double bound = 0.0;     // 1 / min(1/zeta_zf, rho_d + (rho_r + rho_s)/R)
  bool holds = false;     // zeta_mrc < bound
};

/// Throws Error(hypotheses_unmet) unless R > max(R1, R2).
MrcBoundReport mrc_upper_bound_report(const SystemParams& theta,
                                      const RelaxOptions& opts = {});
bool mrc_upper_bound_check(const SystemParams& theta,
                           const RelaxOptions& opts = {});

struct DetectorComparison {
  double rate = 0.0;
  double zeta_mrc = 0.0;
  double zeta_zf = 0.0;
  bool mrc_less = false;
};

std::vector<DetectorComparison> zf_vs_mrc_compare(const SystemParams& base,
                                                  std::span<const double> rates,
                                                  const RelaxOptions& opts = {});

}  // namespace eemimo
