#pragma once

#include <cstdint>
#include <string_view>

namespace eemimo {

enum class Detector { mrc, zf };

std::string_view to_string(Detector det);
/// Parses "mrc" / "zf" (case-insensitive); throws Error(invalid_input).
Detector parse_detector(std::string_view name);

/// A candidate (M, K). Integral configs come from the exact optimizer;
/// relaxed configs carry real values and are used by the relaxations.
class AntennaConfig {
 public:
  static AntennaConfig integral(std::int64_t m, std::int64_t k);
  static AntennaConfig relaxed(double m, double k);

  double m() const { return m_; }
  double k() const { return k_; }
  bool is_integral() const { return integral_; }

 private:
  AntennaConfig(double m, double k, bool integral)
      : m_(m), k_(k), integral_(integral) {}

  double m_;
  double k_;
  bool integral_;
};

/// 2^x - 1 for x > 0. Exact when x is a small integer, accurate for x -> 0,
/// and saturating to +inf instead of trapping when 2^x overflows.
double pow2_minus_one(double x);

/// (M - 1) - (K - 1)(2^{R/K} - 1) for MRC, M - K for ZF. The config is
/// feasible iff this is strictly positive.
double array_margin(const AntennaConfig& cfg, double rate, Detector det);

bool is_feasible(const AntennaConfig& cfg, double rate, Detector det);

/// Normalized SNR each user needs so the sum rate equals `rate`.
/// Throws Error(infeasible) if no finite transmit power suffices.
double gamma_required(const AntennaConfig& cfg, double rate, Detector det);

/// Achievable sum spectral efficiency at normalized SNR `gamma`.
double rate_achieved(const AntennaConfig& cfg, double gamma, Detector det);

}  // namespace eemimo
