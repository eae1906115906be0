#include "eemimo/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "eemimo/error.hpp"
#include "eemimo/parallel.hpp"

namespace eemimo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The closed forms only need alpha > 0; the alpha > 1 model constraint is
// enforced where a full parameter set is optimized.
void check_args(double k, const SystemParams& theta) {
  const bool finite = std::isfinite(theta.rate) && std::isfinite(theta.alpha) &&
                      std::isfinite(theta.rho_r) && std::isfinite(theta.rho_d) &&
                      std::isfinite(theta.rho_s);
  if (!finite || !(theta.rate > 0.0) || !(theta.alpha > 0.0) ||
      theta.rho_d < 0.0 || theta.rho_s < 0.0) {
    throw Error(ErrorKind::invalid_input,
                "closed forms need finite R > 0, alpha > 0, rho >= 0");
  }
  if (!(theta.rho_r > 0.0)) {
    throw Error(ErrorKind::invalid_input,
                "rho_r must be > 0: the inner minimum over M is zero only in "
                "the limit M -> inf");
  }
  if (!(std::isfinite(k) && k >= 1.0)) {
    throw Error(ErrorKind::invalid_input, "k must be finite and >= 1");
  }
}

// 2 sqrt(alpha rho_r k c), split so the product cannot overflow early.
double am_gm_term(double k, double c, const SystemParams& theta) {
  return 2.0 * std::sqrt(theta.alpha * theta.rho_r * k) * std::sqrt(c);
}

double golden_section(const auto& f, double lo, double hi, double rel_tol,
                      std::size_t& iterations) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (std::size_t it = 0; it < 400; ++it) {
    if (b - a <= rel_tol * 0.5 * (a + b)) break;
    ++iterations;
    // Ties move toward smaller k.
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

double h_mrc(double k, const SystemParams& theta) {
  check_args(k, theta);
  return am_gm_term(k, pow2_minus_one(theta.rate / k), theta);
}

double g_r(double k, const SystemParams& theta) {
  check_args(k, theta);
  const double c = pow2_minus_one(theta.rate / k);
  if (!std::isfinite(c)) return kInf;
  const double g = am_gm_term(k, c, theta) + theta.rho_r + theta.rho_s +
                   k * theta.rho_d + (k - 1.0) * theta.rho_r * c;
  return std::isfinite(g) ? g : kInf;
}

double g_zf(double k, const SystemParams& theta) {
  check_args(k, theta);
  const double c = pow2_minus_one(theta.rate / k);
  if (!std::isfinite(c)) return kInf;
  const double g =
      am_gm_term(k, c, theta) + k * (theta.rho_r + theta.rho_d) + theta.rho_s;
  return std::isfinite(g) ? g : kInf;
}

double relaxed_power(double k, const SystemParams& theta, Detector det) {
  return det == Detector::mrc ? g_r(k, theta) : g_zf(k, theta);
}

double optimal_m(const SystemParams& theta, double k, Detector det) {
  check_args(k, theta);
  const double c = pow2_minus_one(theta.rate / k);
  const double excess = std::sqrt(theta.alpha * k / theta.rho_r) * std::sqrt(c);
  double m = 0.0;
  if (det == Detector::zf) {
    m = k + excess;
  } else {
    m = 1.0 + excess;
    if (k != 1.0) m += (k - 1.0) * c;
  }
  if (!std::isfinite(m)) {
    throw Error(ErrorKind::out_of_range, "optimal M overflows");
  }
  return m;
}

double k_upper_bound(const SystemParams& theta, Detector det,
                     double incumbent) {
  const double slope =
      det == Detector::mrc ? theta.rho_d : theta.rho_d + theta.rho_r;
  if (!(slope > 0.0)) {
    throw Error(ErrorKind::unbounded,
                "optimum may lie at k -> inf; supply an explicit k_max");
  }
  return std::max(1.0, std::ceil(incumbent / slope));
}

RelaxedOptimum minimize_relaxed(const SystemParams& theta, Detector det,
                                const RelaxOptions& opts) {
  validate(theta);
  check_args(1.0, theta);
  auto power = [&](double k) { return relaxed_power(k, theta, det); };

  double k_max = 0.0;
  if (opts.k_max) {
    if (!(std::isfinite(*opts.k_max) && *opts.k_max >= 1.0)) {
      throw Error(ErrorKind::invalid_input, "k_max must be finite and >= 1");
    }
    k_max = *opts.k_max;
  } else {
    // k = R keeps 2^{R/k} = 2, so at least one probe is always finite.
    double incumbent = kInf;
    for (double probe : {1.0, theta.rate / 4.0, theta.rate / 2.0, theta.rate,
                         2.0 * theta.rate}) {
      if (probe >= 1.0) incumbent = std::min(incumbent, power(probe));
    }
    k_max = k_upper_bound(theta, det, incumbent);
  }

  const std::size_t n = k_max > 1.0 ? std::max<std::size_t>(opts.grid_points, 2) : 1;
  std::vector<double> ks(n);
  std::vector<double> values(n);
  const double log_span = std::log(k_max);
  for (std::size_t i = 0; i < n; ++i) {
    ks[i] = n == 1 ? 1.0 : std::exp(log_span * static_cast<double>(i) /
                                    static_cast<double>(n - 1));
  }
  ks.back() = k_max;
  parallel_for(n, opts.threads, [&](std::size_t i) { values[i] = power(ks[i]); });

  double best_grid = kInf;
  for (double v : values) {
    if (std::isfinite(v)) best_grid = std::min(best_grid, v);
  }
  if (!std::isfinite(best_grid)) {
    throw Error(ErrorKind::out_of_range,
                "relaxed power is infinite on the whole search grid");
  }

  // Refine every grid-local minimum that is close to the best grid value, so
  // a second basin cannot hide behind grid resolution.
  constexpr double kBasinSlack = 1e-6;
  constexpr std::size_t kMaxBasins = 16;
  std::vector<std::size_t> basins;
  for (std::size_t i = 0; i < n && basins.size() < kMaxBasins; ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || v > best_grid * (1.0 + kBasinSlack)) continue;
    const bool left_ok = i == 0 || !(values[i - 1] < v);
    const bool right_ok = i + 1 == n || !(values[i + 1] < v);
    if (left_ok && right_ok) basins.push_back(i);
  }

  RelaxedOptimum best;
  best.detector = det;
  best.objective = kInf;
  best.diag.grid_points = n;
  best.diag.k_max = k_max;
  for (std::size_t i : basins) {
    const double lo = ks[i == 0 ? 0 : i - 1];
    const double hi = ks[i + 1 == n ? n - 1 : i + 1];
    double k = ks[i];
    double v = values[i];
    if (hi > lo) {
      std::size_t iters = 0;
      const double refined = golden_section(power, lo, hi, opts.rel_tol, iters);
      const double rv = power(refined);
      best.diag.refinement_iterations += iters;
      if (rv < v) {
        k = refined;
        v = rv;
      }
    }
    // Basins are visited in increasing k; a later basin must win by more
    // than the tolerance, so ties keep the smaller k.
    if (v < best.objective * (1.0 - opts.rel_tol)) {
      best.objective = v;
      best.k_star = k;
      best.diag.bracket_lo = lo;
      best.diag.bracket_hi = hi;
    }
  }

  best.m_star = optimal_m(theta, best.k_star, det);
  best.zeta = theta.rate / best.objective;
  return best;
}

}  // namespace eemimo
