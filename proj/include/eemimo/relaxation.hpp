#pragma once

#include <cstddef>
#include <optional>

#include "eemimo/link_model.hpp"
#include "eemimo/units.hpp"

namespace eemimo {

// Continuous relaxations of the (M, K) problem. Every function here
// requires rho_r > 0: with free BS antennas the optimal M is unbounded.

/// Minimum over t > 0 of t rho_r + alpha k (2^{R/k} - 1) / t, i.e. the
/// antenna-dependent part of the MRC power once M is chosen optimally.
double h_mrc(double k, const SystemParams& theta);

/// Total normalized MRC power at real K with M chosen optimally.
/// Returns +inf when 2^{R/k} overflows.
double g_r(double k, const SystemParams& theta);

/// ZF counterpart of g_r: 2 sqrt(alpha rho_r k (2^{R/k}-1)) + k(rho_r+rho_d) + rho_s.
double g_zf(double k, const SystemParams& theta);

/// g_r for MRC, g_zf for ZF.
double relaxed_power(double k, const SystemParams& theta, Detector det);

/// Real-valued antenna count minimizing the power for a given real K.
double optimal_m(const SystemParams& theta, double k, Detector det);

struct RelaxOptions {
  std::optional<double> k_max;     // default: pruning bound from an incumbent
  std::size_t grid_points = 4096;  // log-spaced over [1, k_max]
  double rel_tol = 1e-9;           // golden-section tolerance on k
  unsigned threads = 1;
};

struct SolverDiagnostics {
  std::size_t grid_points = 0;
  std::size_t refinement_iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double k_max = 0.0;
};

struct RelaxedOptimum {
  double k_star = 0.0;
  double m_star = 0.0;
  double zeta = 0.0;
  double objective = 0.0;  // R / zeta, total normalized power
  Detector detector = Detector::mrc;
  SolverDiagnostics diag;
};

/// Upper bound on K beyond which the relaxed power provably exceeds
/// `incumbent`: every k > incumbent / slope has power > incumbent, where
/// slope is rho_d (MRC) or rho_r + rho_d (ZF). Throws Error(unbounded) when
/// the slope is zero.
double k_upper_bound(const SystemParams& theta, Detector det, double incumbent);

/// Minimizes relaxed_power over real k in [1, k_max] by a log-spaced grid
/// scan followed by golden-section refinement of each near-best bracket.
RelaxedOptimum minimize_relaxed(const SystemParams& theta, Detector det,
                                const RelaxOptions& opts = {});

}  // namespace eemimo
