// eemimo: energy-efficiency optimizer for the massive-MIMO uplink.
//
//   eemimo optimize   --config cfg.json      exact + relaxed optimum at one R
//   eemimo sweep      --config cfg.json      the same along sweep.r_values
//   eemimo breakdown  --config cfg.json      power budget at the exact optimum
//   eemimo trajectory --config cfg.json      constant per-user-rate scaling
//   eemimo thresholds --config cfg.json      R1, R2 and the MRC upper bound
//   eemimo validate   --config cfg.json      Monte-Carlo check of the rate bounds
//
// Exit codes: 0 success, 2 config error, 3 numerical or infeasibility error.
// Failed sweep rows are reported in the error column; the run exits 3 only
// when every row failed, or when any row of optimize/breakdown failed.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include <CLI11.hpp>

#include "eemimo/error.hpp"
#include "eemimo/report.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int fail(std::string_view category, std::string_view kind,
         std::string_view message, int code) {
  std::string line(message);
  for (char& c : line) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "eemimo: " << category << ": " << kind << ": " << line << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  namespace rep = eemimo::report;

  CLI::App app{"Energy-efficiency optimization of the massive-MIMO uplink"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> k_max;

  app.add_option("--config", config_path, "JSON configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "Write output here instead of stdout");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "Worker threads")
      ->check(CLI::Range(1u, 1024u));
  app.add_option("--seed", seed, "Override the Monte-Carlo seed");
  app.add_option("--k-max", k_max, "Upper bound on the number of users K")
      ->check(CLI::PositiveNumber);

  const std::pair<const char*, const char*> commands[] = {
      {"optimize", "Exact integer optimum of (M, K) per detector"},
      {"sweep", "Efficiency outputs over a list of rates"},
      {"breakdown", "Power budget split at the optimum"},
      {"trajectory", "Efficiency along M, K proportional to R"},
      {"thresholds", "Rate thresholds and the MRC upper bound"},
      {"validate", "Monte-Carlo rates against the closed-form bounds"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("config_error", "usage", e.what(), kExitConfig);
  }

  try {
    const rep::Config cfg = rep::load_config(config_path);
    rep::RunOptions opts;
    opts.threads = threads;
    opts.seed = seed;
    opts.k_max = k_max ? k_max : cfg.k_max;

    const std::string cmd = app.get_subcommands().front()->get_name();
    rep::Table table;
    if (cmd == "optimize") {
      table = rep::run_optimize(cfg, opts);
    } else if (cmd == "sweep") {
      if (!cfg.sweep) {
        throw eemimo::Error(eemimo::ErrorKind::invalid_input,
                            "config: sweep needs a 'sweep' section");
      }
      table = rep::run_sweep(*cfg.sweep, opts);
    } else if (cmd == "breakdown") {
      table = rep::run_breakdown(cfg, opts);
    } else if (cmd == "trajectory") {
      table = rep::run_trajectory(cfg, opts);
    } else if (cmd == "thresholds") {
      table = rep::run_thresholds(cfg, opts);
    } else {
      table = rep::run_validation(cfg, opts);
    }

    const std::string text =
        format == "json" ? rep::to_json(table) : rep::to_csv(table);
    if (out_path.empty()) {
      std::cout << text;
      std::cout.flush();
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        return fail("config_error", "io", "cannot open '" + out_path + "'",
                    kExitConfig);
      }
      out << text;
    }

    // Row errors are already in the table. Single-point commands fail on any
    // of them; sweeps fail only when nothing could be computed.
    const bool point = cmd == "optimize" || cmd == "breakdown";
    std::size_t failed = 0;
    const std::string* first = nullptr;
    for (const auto& row : table.rows) {
      const auto* msg = std::get_if<std::string>(&row.back());
      if (msg && !msg->empty()) {
        ++failed;
        if (!first) first = msg;
      }
    }
    if (first && (point || failed == table.rows.size())) {
      const std::size_t colon = first->find(": ");
      const std::string kind = first->substr(0, colon);
      const bool config = kind == "invalid_input";
      return fail(config ? "config_error" : "numerical_error", kind,
                  colon == std::string::npos ? *first : first->substr(colon + 2),
                  config ? kExitConfig : kExitNumerical);
    }
  } catch (const eemimo::Error& e) {
    const bool config = e.kind() == eemimo::ErrorKind::invalid_input;
    return fail(config ? "config_error" : "numerical_error",
                eemimo::to_string(e.kind()), e.what(),
                config ? kExitConfig : kExitNumerical);
  }
  return 0;
}
