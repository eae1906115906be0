#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eemimo/link_model.hpp"
#include "eemimo/montecarlo.hpp"
#include "eemimo/units.hpp"

namespace eemimo::report {

enum class Output { exact, relaxed, trajectory, pa_fraction, comparison };

struct SweepSpec {
  std::vector<double> r_values;
  SystemParams theta_base;  // rate ignored
  std::vector<Detector> detectors;
  std::vector<Output> outputs;
  std::optional<double> trajectory_c;  // needed when outputs has trajectory

  bool wants(Output o) const;
};

/// Parsed configuration document. Exactly one of the `physical` and
/// `normalized` sections is present in the source; `theta_base` holds the
/// normalized parameters either way.
struct Config {
  SystemParams theta_base;
  std::optional<PhysicalParams> physical;
  std::optional<double> rate;
  std::vector<Detector> detectors{Detector::mrc, Detector::zf};
  std::optional<std::int64_t> k_max;
  std::optional<SweepSpec> sweep;
  std::optional<double> trajectory_c;
  std::vector<double> trajectory_rates;
  std::vector<McConfig> montecarlo;
};

/// Throws Error(invalid_input) on malformed or inconsistent documents.
Config parse_config(std::string_view json_text);
Config load_config(const std::string& path);

struct RunOptions {
  unsigned threads = 1;
  std::optional<std::int64_t> k_max;  // overrides Config::k_max
  std::optional<std::uint64_t> seed;  // overrides Monte-Carlo seeds
};

using Cell = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// Column layout shared by `sweep` and `optimize`.
inline constexpr std::string_view kSweepHeader =
    "R,detector,M_star,K_star,zeta_star,zeta_relaxed,ratio,pa_fraction,"
    "power_pa,power_bs,power_users,power_residual";

/// Throws Error(invalid_input) before any computation if the sweep is invalid.
void validate(const SweepSpec& spec);

Table run_sweep(const SweepSpec& spec, const RunOptions& opts);
Table run_optimize(const Config& cfg, const RunOptions& opts);
Table run_breakdown(const Config& cfg, const RunOptions& opts);
Table run_trajectory(const Config& cfg, const RunOptions& opts);
Table run_thresholds(const Config& cfg, const RunOptions& opts);
Table run_validation(std::span<const McConfig> configs, const RunOptions& opts);
Table run_validation(const Config& cfg, const RunOptions& opts);

/// Shortest round-trip decimal, '.' separator.
std::string format_number(double x);

/// RFC 4180 CSV, header first, every row newline-terminated.
std::string to_csv(const Table& table);
/// Array of objects keyed by the header, newline-terminated.
std::string to_json(const Table& table);

}  // namespace eemimo::report
