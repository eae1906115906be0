#include <doctest.h>

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "eemimo/asymptotics.hpp"
#include "eemimo/error.hpp"
#include "eemimo/integer_opt.hpp"
#include "eemimo/report.hpp"

using namespace eemimo;
using namespace eemimo::report;

namespace {

const char* kFig1 = R"({
  "normalized": {"alpha": 2, "rho_r": 1000, "rho_d": 1000, "rho_s": 1000},
  "trajectory": {"c": 2},
  "sweep": {"r_values": [1, 50, 400],
            "outputs": ["exact", "relaxed", "pa_fraction", "trajectory", "comparison"]}
})";

ErrorKind kind_of_parse(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::inconsistent;  // not thrown: reported as a mismatch
}

double cell_double(const Cell& c) { return std::get<double>(c); }

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("format_number is shortest round-trip") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(format_number(-2.25) == "-2.25");
  for (double x : {1.0 / 3.0, 2.0 / 7.0, 6.02214076e23, 5e-324, 0.0005292527362}) {
    const std::string s = format_number(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
}

TEST_CASE("CSV quoting and termination") {
  Table t{{"a", "b", "c", "d", "e"},
          {{std::monostate{}, 1.5, std::int64_t{7}, true, std::string("x, \"y\"")}}};
  CHECK(to_csv(t) == "a,b,c,d,e\n,1.5,7,true,\"x, \"\"y\"\"\"\n");
  const auto j = nlohmann::json::parse(to_json(t));
  CHECK(j.at(0).at("a").is_null());
  CHECK(j.at(0).at("b") == 1.5);
  CHECK(j.at(0).at("c") == 7);
  CHECK(j.at(0).at("e") == "x, \"y\"");
}

TEST_CASE("parse normalized config") {
  const Config cfg = parse_config(kFig1);
  CHECK(cfg.theta_base.alpha == 2.0);
  CHECK(cfg.theta_base.rho_s == 1000.0);
  CHECK_FALSE(cfg.physical.has_value());
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->r_values == std::vector<double>{1, 50, 400});
  CHECK(cfg.sweep->wants(Output::trajectory));
  CHECK(cfg.sweep->trajectory_c == 2.0);
  CHECK(cfg.detectors.size() == 2);
}

TEST_CASE("parse physical config goes through normalization") {
  const Config cfg = parse_config(R"({
    "physical": {"bandwidth_hz": 1e7, "noise_psd_w_per_hz": 4e-21, "path_gain": 1e-10,
                 "pa_slope_alpha": 2, "p_r_w": 0.4, "p_t_w": 0.1, "p_dec_w": 0.3,
                 "p_s_w": 2},
    "rate": 40, "detectors": ["zf"], "k_max": 100
  })");
  REQUIRE(cfg.physical.has_value());
  CHECK(cfg.theta_base.rho_r == doctest::Approx(1e3).epsilon(1e-13));
  CHECK(cfg.theta_base.rho_s == doctest::Approx(5e3).epsilon(1e-13));
  CHECK(cfg.rate == 40.0);
  CHECK(cfg.k_max == 100);
  CHECK(cfg.detectors == std::vector<Detector>{Detector::zf});
}

TEST_CASE("config errors are invalid_input") {
  const std::string norm =
      R"("normalized": {"alpha": 2, "rho_r": 1, "rho_d": 1, "rho_s": 1})";
  CHECK(kind_of_parse("{") == ErrorKind::invalid_input);
  CHECK(kind_of_parse("{}") == ErrorKind::invalid_input);
  CHECK(kind_of_parse("{" + norm + R"(, "bogus": 1})") == ErrorKind::invalid_input);
  CHECK(kind_of_parse(R"({"normalized": {"alpha": 2, "rho_r": 1, "rho_d": 1}})") ==
        ErrorKind::invalid_input);
  CHECK(kind_of_parse(R"({"normalized": {"alpha": 0.5, "rho_r": 1, "rho_d": 1, "rho_s": 1}})") ==
        ErrorKind::invalid_input);
  CHECK(kind_of_parse("{" + norm + R"(, "detectors": []})") == ErrorKind::invalid_input);
  CHECK(kind_of_parse("{" + norm + R"(, "detectors": ["mmse"]})") == ErrorKind::invalid_input);
  CHECK(kind_of_parse("{" + norm + R"(, "sweep": {"r_values": [5, 3]}})") ==
        ErrorKind::invalid_input);
  CHECK(kind_of_parse("{" + norm + R"(, "sweep": {"r_values": [1], "outputs": []}})") ==
        ErrorKind::invalid_input);
  CHECK(kind_of_parse("{" + norm + R"(, "sweep": {"r_values": [1], "outputs": ["trajectory"]}})") ==
        ErrorKind::invalid_input);
  CHECK(kind_of_parse("{" + norm +
                      R"(, "montecarlo": {"configs": [{"m": 4, "k": 8, "gamma": 0.1, "detector": "zf"}]}})") ==
        ErrorKind::invalid_input);
  CHECK(kind_of_parse("{" + norm + R"(, "montecarlo": {"seed": -1, "configs": []}})") ==
        ErrorKind::invalid_input);
  CHECK(kind_of_parse(R"({"normalized": {"alpha": 2, "rho_r": 1, "rho_d": 1, "rho_s": 1},
                          "physical": {"bandwidth_hz": 1, "noise_psd_w_per_hz": 1, "path_gain": 1,
                                       "pa_slope_alpha": 2, "p_r_w": 1, "p_t_w": 1, "p_dec_w": 1,
                                       "p_s_w": 1}})") == ErrorKind::invalid_input);
}

TEST_CASE("empty detector set fails before computing") {
  SweepSpec spec;
  spec.r_values = {10.0};
  spec.theta_base = {.rate = 1, .alpha = 2, .rho_r = 1, .rho_d = 1, .rho_s = 1};
  spec.outputs = {Output::exact};
  CHECK_THROWS_AS(run_sweep(spec, {}), Error);
}

TEST_CASE("sweep values equal direct library calls") {
  const Config cfg = parse_config(kFig1);
  const Table t = run_sweep(*cfg.sweep, {});
  std::string header;
  for (std::size_t i = 0; i < 12; ++i) header += (i ? "," : "") + t.header[i];
  CHECK(header == kSweepHeader);
  CHECK(t.header.back() == "error");
  REQUIRE(t.rows.size() == 6);

  for (const auto& row : t.rows) {
    const double rate = cell_double(row[0]);
    const Detector det = parse_detector(std::get<std::string>(row[1]));
    const SystemParams theta = cfg.theta_base.with_rate(rate);
    const auto exact = optimize_exact(theta, det);
    const auto relaxed = minimize_relaxed(theta, det);
    CHECK(std::get<std::int64_t>(row[2]) == exact.m_star);
    CHECK(std::get<std::int64_t>(row[3]) == exact.k_star);
    CHECK(cell_double(row[4]) == exact.zeta_star);
    CHECK(cell_double(row[5]) == relaxed.zeta);
    CHECK(cell_double(row[6]) == exact.zeta_star / relaxed.zeta);
    CHECK(cell_double(row[7]) == exact.report.pa_fraction);
    CHECK(cell_double(row[8]) == exact.report.power_pa);
    CHECK(cell_double(row[9]) == exact.report.power_bs_antennas);
    CHECK(cell_double(row[10]) == exact.report.power_user_circuits);
    CHECK(cell_double(row[11]) == exact.report.power_residual);

    const Cell& traj = row[column(t, "zeta_trajectory")];
    if (det == Detector::mrc && rate > 2.0) {
      CHECK(cell_double(traj) == trajectory_point({2.0, cfg.theta_base}, rate).zeta);
    } else {
      CHECK(std::holds_alternative<std::monostate>(traj));
    }
    CHECK(std::holds_alternative<bool>(row[column(t, "mrc_below_zf")]));
    CHECK(std::holds_alternative<std::monostate>(row.back()));
  }
}

TEST_CASE("row errors are annotated and the run continues") {
  SweepSpec spec;
  spec.r_values = {5.0, 10.0};
  spec.theta_base = {.rate = 1, .alpha = 2, .rho_r = 1, .rho_d = 0, .rho_s = 1};
  spec.detectors = {Detector::mrc};
  spec.outputs = {Output::exact};
  const Table t = run_sweep(spec, {});
  REQUIRE(t.rows.size() == 2);
  for (const auto& row : t.rows) {
    CHECK(std::get<double>(row[0]) > 0.0);
    for (std::size_t i = 2; i + 1 < row.size(); ++i) {
      CHECK(std::holds_alternative<std::monostate>(row[i]));
    }
    CHECK(std::get<std::string>(row.back()).rfind("unbounded: ", 0) == 0);
  }
  RunOptions capped;
  capped.k_max = 40;
  const Table ok = run_sweep(spec, capped);
  CHECK(std::holds_alternative<std::monostate>(ok.rows[0].back()));
}

TEST_CASE("CSV is identical across thread counts") {
  const Config cfg = parse_config(kFig1);
  RunOptions four;
  four.threads = 4;
  CHECK(to_csv(run_sweep(*cfg.sweep, {})) == to_csv(run_sweep(*cfg.sweep, four)));
}

TEST_CASE("breakdown closes the budget") {
  Config cfg = parse_config(kFig1);
  cfg.rate = 100.0;
  const Table t = run_breakdown(cfg, {});
  REQUIRE(t.rows.size() == 6);
  for (const auto& row : t.rows) {
    const double sum = cell_double(row[column(t, "power_pa")]) +
                       cell_double(row[column(t, "power_bs")]) +
                       cell_double(row[column(t, "power_users")]) +
                       cell_double(row[column(t, "power_residual")]);
    CHECK(sum == doctest::Approx(cell_double(row[column(t, "total_power")])).epsilon(1e-12));
  }
}

TEST_CASE("thresholds table") {
  Config cfg = parse_config(R"({"normalized": {"alpha": 2, "rho_r": 1, "rho_d": 1, "rho_s": 1},
                                "sweep": {"r_values": [5, 40]}})");
  const Table t = run_thresholds(cfg, {});
  REQUIRE(t.rows.size() == 2);
  CHECK(std::get<bool>(t.rows[0][column(t, "hypotheses_met")]) == false);
  CHECK(std::holds_alternative<std::monostate>(t.rows[0][column(t, "bound_holds")]));
  CHECK(std::get<bool>(t.rows[1][column(t, "hypotheses_met")]) == true);
  CHECK(std::get<bool>(t.rows[1][column(t, "bound_holds")]) == true);
}

TEST_CASE("trajectory table") {
  Config cfg = parse_config(R"({"normalized": {"alpha": 2, "rho_r": 1, "rho_d": 1, "rho_s": 1},
                                "trajectory": {"c": 2, "r_values": [1, 10000]}})");
  const Table t = run_trajectory(cfg, {});
  REQUIRE(t.rows.size() == 2);
  CHECK_FALSE(std::get<std::string>(t.rows[0].back()).empty());
  CHECK(cell_double(t.rows[1][column(t, "zeta_limit")]) == 0.5);
  CHECK(cell_double(t.rows[1][column(t, "zeta_trajectory")]) ==
        doctest::Approx(0.491511349273086475).epsilon(1e-13));
}

TEST_CASE("validation table records seeds and is deterministic") {
  const Config cfg = parse_config(R"({
    "normalized": {"alpha": 2, "rho_r": 1, "rho_d": 1, "rho_s": 1},
    "montecarlo": {"seed": 18446744073709551615, "trials": 500,
                   "configs": [{"m": 8, "k": 2, "gamma": 0.2, "detector": "mrc"},
                               {"m": 8, "k": 2, "gamma": 0.2, "detector": "zf", "seed": 3}]}
  })");
  const Table t = run_validation(cfg, {});
  REQUIRE(t.rows.size() == 2);
  CHECK(std::get<std::string>(t.rows[0][column(t, "seed")]) == "18446744073709551615");
  CHECK(std::get<std::string>(t.rows[1][column(t, "seed")]) == "3");
  RunOptions two;
  two.threads = 2;
  CHECK(to_csv(t) == to_csv(run_validation(cfg, two)));
  RunOptions reseeded;
  reseeded.seed = 42;
  const Table r = run_validation(cfg, reseeded);
  CHECK(std::get<std::string>(r.rows[1][column(r, "seed")]) == "42");
}
