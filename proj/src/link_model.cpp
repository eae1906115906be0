#include "eemimo/link_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "eemimo/error.hpp"

namespace eemimo {

std::string_view to_string(Detector det) {
  return det == Detector::mrc ? "mrc" : "zf";
}

Detector parse_detector(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "mrc") return Detector::mrc;
  if (lower == "zf") return Detector::zf;
  throw Error(ErrorKind::invalid_input,
              "unknown detector '" + std::string(name) + "'");
}

AntennaConfig AntennaConfig::integral(std::int64_t m, std::int64_t k) {
  if (m < 1 || k < 1) {
    throw Error(ErrorKind::invalid_input, "antenna config requires M, K >= 1");
  }
  return {static_cast<double>(m), static_cast<double>(k), true};
}

AntennaConfig AntennaConfig::relaxed(double m, double k) {
  if (!std::isfinite(m) || !std::isfinite(k) || m < 1.0 || k < 1.0) {
    throw Error(ErrorKind::invalid_input,
                "antenna config requires finite M, K >= 1");
  }
  return {m, k, false};
}

double pow2_minus_one(double x) {
  if (x >= 1.0) return std::exp2(x) - 1.0;
  return std::expm1(x * std::numbers::ln2);
}

double array_margin(const AntennaConfig& cfg, double rate, Detector det) {
  if (det == Detector::zf) return cfg.m() - cfg.k();
  // K = 1 is special-cased so an overflowed 2^R never produces 0 * inf.
  if (cfg.k() == 1.0) return cfg.m() - 1.0;
  const double c = pow2_minus_one(rate / cfg.k());
  return (cfg.m() - 1.0) - (cfg.k() - 1.0) * c;
}

bool is_feasible(const AntennaConfig& cfg, double rate, Detector det) {
  return array_margin(cfg, rate, det) > 0.0;
}

double gamma_required(const AntennaConfig& cfg, double rate, Detector det) {
  if (!(std::isfinite(rate) && rate > 0.0)) {
    throw Error(ErrorKind::invalid_input, "R must be finite and > 0");
  }
  const double margin = array_margin(cfg, rate, det);
  if (!(margin > 0.0)) {
    throw Error(ErrorKind::infeasible,
                "demanded rate unachievable at any transmit power");
  }
  const double gamma = pow2_minus_one(rate / cfg.k()) / margin;
  if (!std::isfinite(gamma)) {
    throw Error(ErrorKind::infeasible,
                "demanded rate unachievable at any transmit power");
  }
  return gamma;
}

double rate_achieved(const AntennaConfig& cfg, double gamma, Detector det) {
  if (!(std::isfinite(gamma) && gamma > 0.0)) {
    throw Error(ErrorKind::invalid_input, "gamma must be finite and > 0");
  }
  double sinr = 0.0;
  if (det == Detector::mrc) {
    sinr = gamma * (cfg.m() - 1.0) / (gamma * (cfg.k() - 1.0) + 1.0);
  } else {
    if (!(cfg.m() > cfg.k())) {
      throw Error(ErrorKind::invalid_input, "ZF requires M > K");
    }
    sinr = gamma * (cfg.m() - cfg.k());
  }
  return cfg.k() * std::log1p(sinr) / std::numbers::ln2;
}

}  // namespace eemimo
