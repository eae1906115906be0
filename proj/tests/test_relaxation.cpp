#include <doctest.h>

#include <cmath>
#include <random>

#include "eemimo/error.hpp"
#include "eemimo/relaxation.hpp"
#include "oracles.hpp"

using namespace eemimo;

namespace {

SystemParams theta(double r, double a, double rr, double rd, double rs) {
  return {.rate = r, .alpha = a, .rho_r = rr, .rho_d = rd, .rho_s = rs};
}

SystemParams random_theta(std::mt19937_64& rng) {
  return theta(oracle::log_uniform(rng, 1.0, 300.0), oracle::uniform(rng, 1.2, 5.0),
               oracle::log_uniform(rng, 1e-2, 1e3), oracle::log_uniform(rng, 1e-2, 1e3),
               oracle::log_uniform(rng, 1e-2, 1e3));
}

}  // namespace

TEST_CASE("h_mrc closed form") {
  CHECK(h_mrc(1.0, theta(2, 1, 1, 0, 0)) == doctest::Approx(3.4641016151377546).epsilon(1e-15));
  CHECK(h_mrc(1.0, theta(2, 4, 1, 0, 0)) == doctest::Approx(6.928203230275509).epsilon(1e-15));
  CHECK(h_mrc(2.0, theta(4, 2, 1, 0, 0)) == doctest::Approx(6.928203230275509).epsilon(1e-15));
  // Against a numeric minimum over t of t rho_r + alpha k (2^{R/k}-1) / t.
  CHECK(h_mrc(2.0, theta(4, 2, 1, 0, 0)) ==
        doctest::Approx(oracle::min_over_t(1.0, 2.0 * 2.0 * 3.0)).epsilon(1e-9));
}

TEST_CASE("rho_r = 0 is rejected") {
  const auto t = theta(4, 2, 0, 1, 1);
  CHECK_THROWS_AS(h_mrc(1.0, t), Error);
  CHECK_THROWS_AS(g_r(1.0, t), Error);
  CHECK_THROWS_AS(optimal_m(t, 1.0, Detector::zf), Error);
  CHECK_THROWS_AS(minimize_relaxed(t, Detector::mrc), Error);
  CHECK_THROWS_AS(h_mrc(0.5, theta(4, 2, 1, 1, 1)), Error);
}

TEST_CASE("g_r special cases") {
  const auto t = theta(4, 2, 1, 1, 1);
  CHECK(g_r(2.0, t) == doctest::Approx(13.928203230275509).epsilon(1e-14));
  CHECK(g_r(1.0, t) ==
        doctest::Approx(2.0 * std::sqrt(2.0 * 15.0) + 3.0).epsilon(1e-14));
  // k = R collapses the exponent to 2.
  CHECK(g_r(4.0, t) ==
        doctest::Approx(2.0 * std::sqrt(8.0) + 1.0 + 1.0 + 4.0 + 3.0).epsilon(1e-14));
  CHECK(std::isinf(g_r(1.0, theta(4000, 2, 1, 1, 1))));
  CHECK(relaxed_power(2.0, t, Detector::mrc) == g_r(2.0, t));
  CHECK(relaxed_power(2.0, t, Detector::zf) == g_zf(2.0, t));
}

TEST_CASE("g_r equals the direct objective at the optimal M") {
  const auto t = theta(4, 2, 1, 1, 1);
  const double m = optimal_m(t, 2.0, Detector::mrc);
  CHECK(m == doctest::Approx(7.464101615137754).epsilon(1e-14));
  const double direct =
      evaluate(AntennaConfig::relaxed(m, 2.0), t, Detector::mrc).total_power;
  CHECK(direct == doctest::Approx(g_r(2.0, t)).epsilon(1e-9));
  double m_oracle = 0.0;
  oracle::inner_min_over_m(2.0, t, Detector::mrc, &m_oracle);
  CHECK(m_oracle == doctest::Approx(m).epsilon(1e-6));
}

TEST_CASE("optimal_m") {
  CHECK(optimal_m(theta(1, 1, 1, 0, 0), 1.0, Detector::mrc) == 2.0);
  std::mt19937_64 rng(29);
  for (int i = 0; i < 300; ++i) {
    const auto t = random_theta(rng);
    const double k = oracle::log_uniform(rng, 1.0, 50.0);
    const double c = pow2_minus_one(t.rate / k);
    if (!std::isfinite(c) || c > 1e12) continue;
    const double mrc = optimal_m(t, k, Detector::mrc);
    const double zf = optimal_m(t, k, Detector::zf);
    CHECK(mrc - zf == doctest::Approx((k - 1.0) * (c - 1.0)).epsilon(1e-9).scale(1.0));
    CHECK(is_feasible(AntennaConfig::relaxed(mrc, k), t.rate, Detector::mrc));
    CHECK(is_feasible(AntennaConfig::relaxed(zf, k), t.rate, Detector::zf));
    // ZF closed form is the direct objective at its own optimal M.
    const double direct =
        evaluate(AntennaConfig::relaxed(zf, k), t, Detector::zf).total_power;
    CHECK(direct == doctest::Approx(g_zf(k, t)).epsilon(1e-9));
  }
}

TEST_CASE("property: AM-GM lower bound of the inner objective") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    const auto t = random_theta(rng);
    const double k = oracle::log_uniform(rng, 1.0, 100.0);
    const double b = t.alpha * k * pow2_minus_one(t.rate / k);
    if (!std::isfinite(b)) continue;
    const double h = h_mrc(k, t);
    const double tau = oracle::log_uniform(rng, 1e-6, 1e6);
    CHECK(tau * t.rho_r + b / tau >= h * (1.0 - 1e-14));
    const double t_star = std::sqrt(b / t.rho_r);
    CHECK(t_star * t.rho_r + b / t_star == doctest::Approx(h).epsilon(1e-13));
  }
}

TEST_CASE("minimize_relaxed matches a 10x denser grid oracle") {
  for (double r : {50.0, 200.0, 800.0}) {
    const auto t = theta(r, 2, 1e3, 1e3, 1e3);
    const auto opt = minimize_relaxed(t, Detector::mrc);
    const double oracle_min =
        oracle::grid_min([&](double k) { return g_r(k, t); }, 1.0, opt.diag.k_max, 40960);
    CHECK(opt.objective == doctest::Approx(oracle_min).epsilon(1e-6));
    CHECK(opt.objective <= oracle_min * (1.0 + 1e-12));
  }
}

TEST_CASE("minimize_relaxed result invariants") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 60; ++i) {
    const auto t = random_theta(rng);
    for (Detector det : {Detector::mrc, Detector::zf}) {
      const auto opt = minimize_relaxed(t, det);
      CHECK(opt.detector == det);
      CHECK(opt.k_star >= 1.0);
      CHECK(opt.k_star <= opt.diag.k_max);
      CHECK(opt.objective == doctest::Approx(t.rate / opt.zeta).epsilon(1e-12));
      CHECK(opt.m_star == doctest::Approx(optimal_m(t, opt.k_star, det)).epsilon(1e-9));
      CHECK(is_feasible(AntennaConfig::relaxed(opt.m_star, opt.k_star), t.rate, det));
      CHECK(opt.diag.grid_points == 4096);
    }
  }
}

TEST_CASE("relaxed optimum dominates random feasible points") {
  std::mt19937_64 rng(41);
  const auto t = theta(60, 2, 10, 5, 20);
  for (Detector det : {Detector::mrc, Detector::zf}) {
    const auto opt = minimize_relaxed(t, det);
    for (int i = 0; i < 100; ++i) {
      const double k = oracle::log_uniform(rng, 1.0, 200.0);
      const double edge = oracle::feasibility_edge(k, t, det);
      if (!std::isfinite(edge)) continue;
      const double m = edge + oracle::log_uniform(rng, 1e-3, 1e4);
      const double p = oracle::power_at(m, k, t, det);
      if (!std::isfinite(p)) continue;
      CHECK(t.rate / p <= opt.zeta * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("argmin does not depend on rho_s") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 30; ++i) {
    const auto t = random_theta(rng);
    auto u = t;
    u.rho_s = t.rho_s * oracle::log_uniform(rng, 1e-3, 1e3);
    for (Detector det : {Detector::mrc, Detector::zf}) {
      RelaxOptions opts;
      opts.k_max = 1e4;
      const auto a = minimize_relaxed(t, det, opts);
      const auto b = minimize_relaxed(u, det, opts);
      // The flat minimum pins k_star only to about sqrt(eps); the objective
      // at either argmin must agree to rounding.
      CHECK(a.k_star == doctest::Approx(b.k_star).epsilon(1e-4));
      CHECK(relaxed_power(b.k_star, t, det) <= a.objective * (1.0 + 1e-12));
      CHECK(b.objective - u.rho_s ==
            doctest::Approx(a.objective - t.rho_s).epsilon(1e-9));
    }
  }
}

TEST_CASE("unbounded search without k_max") {
  auto t = theta(20, 2, 1, 0, 1);
  try {
    minimize_relaxed(t, Detector::mrc);
    FAIL("expected unbounded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unbounded);
  }
  RelaxOptions opts;
  opts.k_max = 500.0;
  const auto opt = minimize_relaxed(t, Detector::mrc, opts);
  CHECK(opt.k_star <= 500.0);
  CHECK(opt.diag.k_max == 500.0);
  // ZF still has the rho_r per-user slope.
  CHECK_NOTHROW(minimize_relaxed(t, Detector::zf));
  CHECK_THROWS_AS(k_upper_bound(t, Detector::mrc, 10.0), Error);
  CHECK(k_upper_bound(theta(20, 2, 1, 2, 1), Detector::mrc, 10.0) >= 5.0);
}

TEST_CASE("thread count does not change the relaxed optimum") {
  const auto t = theta(700, 2, 1e3, 1e3, 1e3);
  RelaxOptions one, four;
  four.threads = 4;
  for (Detector det : {Detector::mrc, Detector::zf}) {
    const auto a = minimize_relaxed(t, det, one);
    const auto b = minimize_relaxed(t, det, four);
    CHECK(a.k_star == b.k_star);
    CHECK(a.objective == b.objective);
  }
}
