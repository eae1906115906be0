#pragma once

#include "eemimo/link_model.hpp"
#include "eemimo/units.hpp"

namespace eemimo {

/// Energy efficiency at one (M, K) together with the additive breakdown of
/// the normalized power budget R / zeta.
struct EfficiencyReport {
  double zeta = 0.0;
  double gamma = 0.0;
  double power_pa = 0.0;             // alpha K gamma, PAs in the UTs
  double power_bs_antennas = 0.0;    // M rho_r
  double power_user_circuits = 0.0;  // K rho_d
  double power_residual = 0.0;       // rho_s
  double total_power = 0.0;          // R / zeta
  double pa_fraction = 0.0;          // power_pa / total_power
};

/// Throws Error(infeasible) for configs outside the feasibility set and
/// Error(out_of_range) when zeta is not a normal positive double.
EfficiencyReport evaluate(const AntennaConfig& cfg, const SystemParams& theta,
                          Detector det);

double pa_power_fraction(const AntennaConfig& cfg, const SystemParams& theta,
                         Detector det);

}  // namespace eemimo
