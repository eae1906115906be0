#include "eemimo/units.hpp"

#include <cmath>
#include <string>

#include "eemimo/error.hpp"

namespace eemimo {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::invalid_input, what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }
bool nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void validate(const PhysicalParams& p) {
  require(positive(p.bandwidth_hz), "bandwidth must be finite and > 0");
  require(positive(p.noise_psd_w_per_hz), "noise PSD must be finite and > 0");
  require(positive(p.path_gain), "path gain must be finite and > 0");
  require(std::isfinite(p.pa_slope_alpha) && p.pa_slope_alpha > 1.0,
          "PA slope alpha must be finite and > 1");
  require(nonnegative(p.p_r_w), "p_r must be finite and >= 0");
  require(nonnegative(p.p_t_w), "p_t must be finite and >= 0");
  require(nonnegative(p.p_dec_w), "p_dec must be finite and >= 0");
  require(nonnegative(p.p_s_w), "p_s must be finite and >= 0");
}

void validate(const SystemParams& theta) {
  require(positive(theta.rate), "R must be finite and > 0");
  require(std::isfinite(theta.alpha) && theta.alpha > 1.0,
          "alpha must be finite and > 1");
  require(nonnegative(theta.rho_r), "rho_r must be finite and >= 0");
  require(nonnegative(theta.rho_d), "rho_d must be finite and >= 0");
  require(nonnegative(theta.rho_s), "rho_s must be finite and >= 0");
}

SystemParams normalize(const PhysicalParams& p, double rate) {
  validate(p);
  // Scale = Gc / (N0 B); computed as a product of two ratios so that the
  // typical 1e-10 / 4e-14 magnitudes do not underflow in the intermediate.
  const double scale = (p.path_gain / p.noise_psd_w_per_hz) / p.bandwidth_hz;
  SystemParams theta{
      .rate = rate,
      .alpha = p.pa_slope_alpha,
      .rho_r = scale * p.p_r_w,
      .rho_d = scale * (p.p_t_w + p.p_dec_w),
      .rho_s = scale * p.p_s_w,
  };
  if (!std::isfinite(scale) || !std::isfinite(theta.rho_r) ||
      !std::isfinite(theta.rho_d) || !std::isfinite(theta.rho_s)) {
    throw Error(ErrorKind::invalid_input,
                "normalized power parameters are not finite");
  }
  validate(theta);
  return theta;
}

double denormalize_efficiency(double zeta, const PhysicalParams& p) {
  require(nonnegative(zeta), "zeta must be finite and >= 0");
  validate(p);
  const double eta = zeta * p.path_gain / p.noise_psd_w_per_hz;
  if (!std::isfinite(eta)) {
    throw Error(ErrorKind::out_of_range, "efficiency in bits/Joule overflows");
  }
  return eta;
}

double normalized_snr(const PhysicalParams& p, double radiated_power_w) {
  validate(p);
  require(nonnegative(radiated_power_w), "radiated power must be >= 0");
  return (p.path_gain / p.noise_psd_w_per_hz) / p.bandwidth_hz *
         radiated_power_w;
}

double total_power_watts(const PhysicalParams& p, double m, double k,
                         double radiated_power_w) {
  validate(p);
  return k * (p.pa_slope_alpha * radiated_power_w + p.p_t_w + p.p_dec_w) +
         m * p.p_r_w + p.p_s_w;
}

}  // namespace eemimo
