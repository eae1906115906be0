#include "eemimo/efficiency.hpp"

#include <cmath>

#include "eemimo/error.hpp"

namespace eemimo {

EfficiencyReport evaluate(const AntennaConfig& cfg, const SystemParams& theta,
                          Detector det) {
  validate(theta);
  EfficiencyReport rep;
  rep.gamma = gamma_required(cfg, theta.rate, det);
  rep.power_pa = theta.alpha * cfg.k() * rep.gamma;
  rep.power_bs_antennas = cfg.m() * theta.rho_r;
  rep.power_user_circuits = cfg.k() * theta.rho_d;
  rep.power_residual = theta.rho_s;
  rep.total_power = rep.power_pa + (rep.power_user_circuits +
                                    rep.power_bs_antennas + rep.power_residual);
  rep.zeta = theta.rate / rep.total_power;
  if (!std::isfinite(rep.total_power) || !std::isnormal(rep.zeta)) {
    throw Error(ErrorKind::out_of_range,
                "energy efficiency is outside the representable range");
  }
  rep.pa_fraction = rep.power_pa / rep.total_power;
  return rep;
}

double pa_power_fraction(const AntennaConfig& cfg, const SystemParams& theta,
                         Detector det) {
  return evaluate(cfg, theta, det).pa_fraction;
}

}  // namespace eemimo
