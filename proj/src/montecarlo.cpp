#include "eemimo/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "eemimo/error.hpp"
#include "eemimo/parallel.hpp"

namespace eemimo {
namespace {

constexpr std::int64_t kMinTrials = 100;
constexpr std::size_t kBlockTrials = 512;
constexpr std::uint64_t kMaxAttempts = 64;
constexpr double kZ95 = 1.959963984540054;

std::uint64_t mix(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void fill_channel(Eigen::MatrixXcd& h, std::uint64_t seed, std::uint64_t trial,
                  std::uint64_t attempt) {
  for (Eigen::Index col = 0; col < h.cols(); ++col) {
    SplitMix64 rng(substream_key(seed, trial, static_cast<std::uint64_t>(col),
                                 attempt));
    for (Eigen::Index row = 0; row < h.rows(); ++row) {
      h(row, col) = complex_gaussian(rng);
    }
  }
}

struct Workspace {
  Eigen::MatrixXcd h;
  Eigen::MatrixXcd gram;
  Eigen::MatrixXcd inv;
  Eigen::LLT<Eigen::MatrixXcd> llt;
};

// Sum over users of log2(1 + SINR_k) for MRC combining, from H^H H.
double mrc_rate(const Eigen::MatrixXcd& gram, double gamma) {
  const Eigen::Index k = gram.rows();
  double total = 0.0;
  for (Eigen::Index u = 0; u < k; ++u) {
    const double norm2 = gram(u, u).real();
    double interference = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j != u) interference += std::norm(gram(u, j));
    }
    const double denom = gamma * interference + norm2;
    const double sinr = denom > 0.0 ? gamma * norm2 * norm2 / denom : 0.0;
    total += std::log1p(sinr);
  }
  return total / std::numbers::ln2;
}

// Diagonal of (H^H H)^{-1} into ws.inv; false when numerically singular.
bool zf_diagonal(Workspace& ws) {
  ws.llt.compute(ws.gram);
  if (ws.llt.info() != Eigen::Success) return false;
  const Eigen::Index k = ws.gram.rows();
  ws.inv = ws.llt.solve(Eigen::MatrixXcd::Identity(k, k));
  for (Eigen::Index u = 0; u < k; ++u) {
    const double d = ws.inv(u, u).real();
    if (!(std::isfinite(d) && d > 0.0)) return false;
  }
  return true;
}

double zf_rate(const Eigen::MatrixXcd& inv, double gamma) {
  double total = 0.0;
  for (Eigen::Index u = 0; u < inv.rows(); ++u) {
    total += std::log1p(gamma / inv(u, u).real());
  }
  return total / std::numbers::ln2;
}

McResult summarize(const McConfig& cfg, const std::vector<double>& per_trial,
                   std::int64_t resampled) {
  McResult res;
  double sum = 0.0;
  for (double v : per_trial) sum += v;
  const double n = static_cast<double>(per_trial.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : per_trial) ss += (v - mean) * (v - mean);
  const double variance = ss / (n - 1.0);

  res.empirical_rate = mean;
  res.ci_halfwidth = kZ95 * std::sqrt(variance / n);
  res.resampled_trials = resampled;
  // At M = K the ZF closed form is K log2(1 + 0) = 0.
  if (cfg.detector == Detector::zf && cfg.m == cfg.k) {
    res.bound_rate = 0.0;
  } else {
    res.bound_rate = rate_achieved(AntennaConfig::integral(cfg.m, cfg.k),
                                   cfg.gamma, cfg.detector);
  }
  res.margin = res.empirical_rate - res.bound_rate;
  return res;
}

// Configs sharing (m, k, seed, trials) see the same channel draws, so each
// trial's channel is drawn once and scored for every member. Per-config
// arithmetic matches a lone run exactly.
std::vector<McResult> simulate_group(std::span<const McConfig* const> group,
                                     unsigned threads) {
  const McConfig& lead = *group.front();
  const auto trials = static_cast<std::size_t>(lead.trials);
  const std::size_t n_cfg = group.size();
  bool any_zf = false;
  for (const McConfig* c : group) any_zf = any_zf || c->detector == Detector::zf;

  std::vector<std::vector<double>> per_trial(n_cfg, std::vector<double>(trials));
  std::vector<std::uint8_t> resampled(trials, 0);

  const std::size_t blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  parallel_for(blocks, threads, [&](std::size_t b) {
    Workspace ws;
    ws.h.resize(lead.m, lead.k);
    const std::size_t end = std::min(trials, (b + 1) * kBlockTrials);
    for (std::size_t t = b * kBlockTrials; t < end; ++t) {
      fill_channel(ws.h, lead.seed, t, 0);
      ws.gram.noalias() = ws.h.adjoint() * ws.h;
      for (std::size_t i = 0; i < n_cfg; ++i) {
        if (group[i]->detector == Detector::mrc) {
          per_trial[i][t] = mrc_rate(ws.gram, group[i]->gamma);
        }
      }
      if (!any_zf) continue;
      std::uint64_t attempt = 0;
      while (!zf_diagonal(ws)) {
        if (++attempt == kMaxAttempts) {
          throw Error(ErrorKind::out_of_range,
                      "channel Gram matrix repeatedly singular");
        }
        fill_channel(ws.h, lead.seed, t, attempt);
        ws.gram.noalias() = ws.h.adjoint() * ws.h;
      }
      resampled[t] = attempt > 0;
      for (std::size_t i = 0; i < n_cfg; ++i) {
        if (group[i]->detector == Detector::zf) {
          per_trial[i][t] = zf_rate(ws.inv, group[i]->gamma);
        }
      }
    }
  });

  std::int64_t zf_resampled = 0;
  for (std::uint8_t r : resampled) zf_resampled += r;
  std::vector<McResult> out;
  out.reserve(n_cfg);
  for (std::size_t i = 0; i < n_cfg; ++i) {
    out.push_back(summarize(*group[i], per_trial[i],
                            group[i]->detector == Detector::zf ? zf_resampled : 0));
  }
  return out;
}

}  // namespace

std::uint64_t substream_key(std::uint64_t seed, std::uint64_t trial,
                            std::uint64_t user, std::uint64_t attempt) {
  std::uint64_t key = mix(seed + 0x9e3779b97f4a7c15ULL);
  key = mix(key ^ (trial + 0xd1b54a32d192ed03ULL));
  key = mix(key ^ (user + 0x8cb92ba72f3d8dd7ULL));
  return mix(key ^ (attempt + 0xaef17502108ef2d9ULL));
}

std::complex<double> complex_gaussian(SplitMix64& rng) {
  const double radius = std::sqrt(-std::log(rng.open_unit()));
  const double angle = 2.0 * std::numbers::pi * rng.half_open_unit();
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

Eigen::MatrixXcd draw_channel(std::uint64_t seed, std::uint64_t trial,
                              std::int64_t m, std::int64_t k,
                              std::uint64_t attempt) {
  if (m < 1 || k < 1) {
    throw Error(ErrorKind::invalid_input, "channel needs M, K >= 1");
  }
  Eigen::MatrixXcd h(m, k);
  fill_channel(h, seed, trial, attempt);
  return h;
}

void validate(const McConfig& cfg) {
  if (cfg.k < 1) throw Error(ErrorKind::invalid_input, "K must be >= 1");
  if (cfg.m < 1) throw Error(ErrorKind::invalid_input, "M must be >= 1");
  if (cfg.detector == Detector::zf && cfg.m < cfg.k) {
    throw Error(ErrorKind::invalid_input, "ZF requires M >= K");
  }
  if (!(std::isfinite(cfg.gamma) && cfg.gamma > 0.0)) {
    throw Error(ErrorKind::invalid_input, "gamma must be finite and > 0");
  }
  if (cfg.trials < kMinTrials) {
    throw Error(ErrorKind::invalid_input,
                "at least 100 trials are required for a valid interval");
  }
}

McResult simulate(const McConfig& cfg, unsigned threads) {
  validate(cfg);
  const McConfig* one[] = {&cfg};
  return simulate_group(one, threads).front();
}

std::vector<McResult> bound_gap_sweep(std::span<const McConfig> family,
                                      unsigned threads) {
  if (family.empty()) {
    throw Error(ErrorKind::invalid_input, "validation family is empty");
  }
  for (const McConfig& cfg : family) validate(cfg);
  std::vector<McResult> out(family.size());
  std::vector<bool> done(family.size(), false);
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> members;
    std::vector<const McConfig*> group;
    for (std::size_t j = i; j < family.size(); ++j) {
      const McConfig& a = family[i];
      const McConfig& b = family[j];
      if (!done[j] && a.m == b.m && a.k == b.k && a.seed == b.seed &&
          a.trials == b.trials) {
        members.push_back(j);
        group.push_back(&b);
        done[j] = true;
      }
    }
    const auto results = simulate_group(group, threads);
    for (std::size_t g = 0; g < members.size(); ++g) out[members[g]] = results[g];
  }
  return out;
}

}  // namespace eemimo
