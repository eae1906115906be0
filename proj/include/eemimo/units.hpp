#pragma once

namespace eemimo {

/// Raw physical description of the uplink, linear units throughout.
struct PhysicalParams {
  double bandwidth_hz = 0.0;         // B
  double noise_psd_w_per_hz = 0.0;   // N0
  double path_gain = 0.0;            // Gc, common to all users
  double pa_slope_alpha = 0.0;       // PA power = alpha * radiated power
  double p_r_w = 0.0;                // per BS antenna hardware
  double p_t_w = 0.0;                // per UT circuitry except the PA
  double p_dec_w = 0.0;              // per-user processing at the BS
  double p_s_w = 0.0;                // residual, independent of (M, K)
};

/// Dimensionless parameters Theta = (R, alpha, rho_r, rho_d, rho_s).
struct SystemParams {
  double rate = 0.0;  // sum spectral efficiency R, bits/s/Hz
  double alpha = 0.0;
  double rho_r = 0.0;
  double rho_d = 0.0;
  double rho_s = 0.0;

  SystemParams with_rate(double r) const {
    SystemParams copy = *this;
    copy.rate = r;
    return copy;
  }
};

/// Throws Error(invalid_input) when an invariant is violated.
void validate(const PhysicalParams& p);
void validate(const SystemParams& theta);

SystemParams normalize(const PhysicalParams& p, double rate);

/// zeta * Gc / N0, in bits/Joule.
double denormalize_efficiency(double zeta, const PhysicalParams& p);

/// Normalized transmit SNR gamma = Gc p_u / (N0 B) for radiated power p_u.
double normalized_snr(const PhysicalParams& p, double radiated_power_w);

/// Total consumed power in Watts for M antennas, K users each radiating p_u.
double total_power_watts(const PhysicalParams& p, double m, double k,
                         double radiated_power_w);

}  // namespace eemimo
