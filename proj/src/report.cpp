#include "eemimo/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "eemimo/asymptotics.hpp"
#include "eemimo/error.hpp"
#include "eemimo/integer_opt.hpp"
#include "eemimo/parallel.hpp"
#include "eemimo/relaxation.hpp"

namespace eemimo::report {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::invalid_input, "config: " + what);
}

void reject_unknown_keys(const json& obj, std::string_view where,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      config_error("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

double number_at(const json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key)) {
    config_error("missing '" + std::string(key) + "' in " + std::string(where));
  }
  const json& v = obj.at(key);
  if (!v.is_number()) {
    config_error("'" + std::string(key) + "' in " + std::string(where) +
                 " must be a number");
  }
  return v.get<double>();
}

std::int64_t integer_at(const json& obj, const char* key,
                        std::string_view where) {
  if (!obj.contains(key)) {
    config_error("missing '" + std::string(key) + "' in " + std::string(where));
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    config_error("'" + std::string(key) + "' in " + std::string(where) +
                 " must be an integer");
  }
  return v.get<std::int64_t>();
}

std::vector<double> rates_at(const json& obj, std::string_view where) {
  if (!obj.contains("r_values") || !obj.at("r_values").is_array()) {
    config_error("'r_values' array required in " + std::string(where));
  }
  std::vector<double> out;
  for (const json& v : obj.at("r_values")) {
    if (!v.is_number()) config_error("r_values must be numbers");
    out.push_back(v.get<double>());
  }
  if (out.empty()) config_error("r_values is empty in " + std::string(where));
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(std::isfinite(out[i]) && out[i] > 0.0) ||
        (i > 0 && !(out[i] > out[i - 1]))) {
      config_error("r_values must be positive and strictly increasing");
    }
  }
  return out;
}

Output parse_output(const std::string& s) {
  if (s == "exact") return Output::exact;
  if (s == "relaxed") return Output::relaxed;
  if (s == "trajectory") return Output::trajectory;
  if (s == "pa_fraction") return Output::pa_fraction;
  if (s == "comparison") return Output::comparison;
  config_error("unknown sweep output '" + s + "'");
}

std::vector<Detector> parse_detectors(const json& arr) {
  if (!arr.is_array()) config_error("'detectors' must be an array");
  std::vector<Detector> out;
  for (const json& v : arr) {
    if (!v.is_string()) config_error("detector names must be strings");
    const Detector d = parse_detector(v.get<std::string>());
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
  }
  if (out.empty()) config_error("detector set is empty");
  return out;
}

std::string error_text(const Error& e) {
  return std::string(to_string(e.kind())) + ": " + e.what();
}

std::optional<std::int64_t> effective_k_max(const Config& cfg,
                                            const RunOptions& opts) {
  return opts.k_max ? opts.k_max : cfg.k_max;
}

RelaxOptions relax_options(std::optional<std::int64_t> k_max) {
  RelaxOptions r;
  if (k_max) r.k_max = static_cast<double>(*k_max);
  return r;
}

std::vector<double> rates_or_single(const Config& cfg, const char* command) {
  if (cfg.sweep) return cfg.sweep->r_values;
  if (cfg.rate) return {*cfg.rate};
  config_error(std::string(command) + " needs 'rate' or a 'sweep' section");
}

std::vector<std::string> split_header(std::string_view csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = csv.find(',', start);
    out.emplace_back(csv.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Evaluates rows in parallel; a row that throws keeps its leading key cells
// and gets empty fields plus the error text in the last column.
Table build_table(std::vector<std::string> header, std::size_t n_rows,
                  unsigned threads,
                  const std::function<std::vector<Cell>(std::size_t)>& keys,
                  const std::function<std::vector<Cell>(std::size_t)>& body) {
  Table t;
  t.header = std::move(header);
  t.rows.resize(n_rows);
  parallel_for(n_rows, threads, [&](std::size_t i) {
    std::vector<Cell> row = keys(i);
    try {
      std::vector<Cell> rest = body(i);
      row.insert(row.end(), rest.begin(), rest.end());
      row.resize(t.header.size() - 1);
      row.emplace_back(std::monostate{});
    } catch (const Error& e) {
      row.resize(t.header.size() - 1);
      row.emplace_back(error_text(e));
    }
    t.rows[i] = std::move(row);
  });
  return t;
}

std::string csv_field(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
          std::string quoted = "\"";
          for (char c : v) {
            if (c == '"') quoted += '"';
            quoted += c;
          }
          return quoted + "\"";
        }
      },
      cell);
}

}  // namespace

bool SweepSpec::wants(Output o) const {
  return std::find(outputs.begin(), outputs.end(), o) != outputs.end();
}

Config parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("document must be a JSON object");
  reject_unknown_keys(doc, "document",
                      {"normalized", "physical", "rate", "detectors", "k_max",
                       "sweep", "trajectory", "montecarlo"});

  Config cfg;
  if (doc.contains("rate")) {
    cfg.rate = number_at(doc, "rate", "document");
  }
  const double rate_for_validation = cfg.rate.value_or(1.0);

  const bool has_norm = doc.contains("normalized");
  const bool has_phys = doc.contains("physical");
  if (has_norm == has_phys) {
    config_error("exactly one of 'normalized' and 'physical' is required");
  }
  if (has_norm) {
    const json& n = doc.at("normalized");
    reject_unknown_keys(n, "normalized", {"alpha", "rho_r", "rho_d", "rho_s"});
    cfg.theta_base = SystemParams{
        .rate = rate_for_validation,
        .alpha = number_at(n, "alpha", "normalized"),
        .rho_r = number_at(n, "rho_r", "normalized"),
        .rho_d = number_at(n, "rho_d", "normalized"),
        .rho_s = number_at(n, "rho_s", "normalized"),
    };
    validate(cfg.theta_base);
  } else {
    const json& p = doc.at("physical");
    reject_unknown_keys(p, "physical",
                        {"bandwidth_hz", "noise_psd_w_per_hz", "path_gain",
                         "pa_slope_alpha", "p_r_w", "p_t_w", "p_dec_w",
                         "p_s_w"});
    PhysicalParams phys{
        .bandwidth_hz = number_at(p, "bandwidth_hz", "physical"),
        .noise_psd_w_per_hz = number_at(p, "noise_psd_w_per_hz", "physical"),
        .path_gain = number_at(p, "path_gain", "physical"),
        .pa_slope_alpha = number_at(p, "pa_slope_alpha", "physical"),
        .p_r_w = number_at(p, "p_r_w", "physical"),
        .p_t_w = number_at(p, "p_t_w", "physical"),
        .p_dec_w = number_at(p, "p_dec_w", "physical"),
        .p_s_w = number_at(p, "p_s_w", "physical"),
    };
    cfg.theta_base = normalize(phys, rate_for_validation);
    cfg.physical = phys;
  }

  if (doc.contains("detectors")) {
    cfg.detectors = parse_detectors(doc.at("detectors"));
  }
  if (doc.contains("k_max")) {
    cfg.k_max = integer_at(doc, "k_max", "document");
    if (*cfg.k_max < 1) config_error("k_max must be >= 1");
  }

  if (doc.contains("trajectory")) {
    const json& t = doc.at("trajectory");
    reject_unknown_keys(t, "trajectory", {"c", "r_values"});
    cfg.trajectory_c = number_at(t, "c", "trajectory");
    if (!(std::isfinite(*cfg.trajectory_c) && *cfg.trajectory_c > 0.0)) {
      config_error("trajectory c must be > 0");
    }
    if (t.contains("r_values")) cfg.trajectory_rates = rates_at(t, "trajectory");
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    reject_unknown_keys(s, "sweep", {"r_values", "outputs"});
    SweepSpec spec;
    spec.r_values = rates_at(s, "sweep");
    spec.theta_base = cfg.theta_base;
    spec.detectors = cfg.detectors;
    spec.trajectory_c = cfg.trajectory_c;
    if (s.contains("outputs")) {
      if (!s.at("outputs").is_array()) config_error("'outputs' must be an array");
      for (const json& o : s.at("outputs")) {
        if (!o.is_string()) config_error("output names must be strings");
        const Output out = parse_output(o.get<std::string>());
        if (!spec.wants(out)) spec.outputs.push_back(out);
      }
    } else {
      spec.outputs = {Output::exact, Output::relaxed, Output::pa_fraction};
    }
    validate(spec);
    cfg.sweep = std::move(spec);
  }

  if (doc.contains("montecarlo")) {
    const json& mc = doc.at("montecarlo");
    reject_unknown_keys(mc, "montecarlo", {"seed", "trials", "configs"});
    std::uint64_t seed = 0;
    if (mc.contains("seed")) {
      if (!mc.at("seed").is_number_unsigned()) {
        config_error("montecarlo seed must be a non-negative integer");
      }
      seed = mc.at("seed").get<std::uint64_t>();
    }
    std::int64_t trials = 100000;
    if (mc.contains("trials")) trials = integer_at(mc, "trials", "montecarlo");
    if (!mc.contains("configs") || !mc.at("configs").is_array()) {
      config_error("'configs' array required in montecarlo");
    }
    for (const json& c : mc.at("configs")) {
      reject_unknown_keys(c, "montecarlo config",
                          {"m", "k", "gamma", "detector", "trials", "seed"});
      McConfig mcc;
      mcc.m = integer_at(c, "m", "montecarlo config");
      mcc.k = integer_at(c, "k", "montecarlo config");
      mcc.gamma = number_at(c, "gamma", "montecarlo config");
      mcc.trials = c.contains("trials")
                       ? integer_at(c, "trials", "montecarlo config")
                       : trials;
      mcc.seed = seed;
      if (c.contains("seed")) {
        if (!c.at("seed").is_number_unsigned()) {
          config_error("montecarlo seed must be a non-negative integer");
        }
        mcc.seed = c.at("seed").get<std::uint64_t>();
      }
      if (!c.contains("detector") || !c.at("detector").is_string()) {
        config_error("montecarlo config needs a 'detector' string");
      }
      mcc.detector = parse_detector(c.at("detector").get<std::string>());
      eemimo::validate(mcc);
      cfg.montecarlo.push_back(mcc);
    }
    if (cfg.montecarlo.empty()) config_error("montecarlo configs is empty");
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const SweepSpec& spec) {
  if (spec.detectors.empty()) config_error("detector set is empty");
  if (spec.outputs.empty()) config_error("no sweep outputs selected");
  if (spec.r_values.empty()) config_error("r_values is empty");
  for (std::size_t i = 0; i < spec.r_values.size(); ++i) {
    if (!(std::isfinite(spec.r_values[i]) && spec.r_values[i] > 0.0) ||
        (i > 0 && !(spec.r_values[i] > spec.r_values[i - 1]))) {
      config_error("r_values must be positive and strictly increasing");
    }
  }
  if (spec.wants(Output::trajectory) && !spec.trajectory_c) {
    config_error("trajectory output needs a 'trajectory' section with c");
  }
  SystemParams probe = spec.theta_base;
  probe.rate = spec.r_values.front();
  eemimo::validate(probe);
}

Table run_sweep(const SweepSpec& spec, const RunOptions& opts) {
  validate(spec);
  std::vector<std::string> header = split_header(kSweepHeader);
  if (spec.wants(Output::trajectory)) header.emplace_back("zeta_trajectory");
  if (spec.wants(Output::comparison)) header.emplace_back("mrc_below_zf");
  header.emplace_back("error");

  const std::size_t n_det = spec.detectors.size();
  const std::size_t n_rows = spec.r_values.size() * n_det;
  ExactOptions exact_opts;
  exact_opts.k_max = opts.k_max;
  const RelaxOptions relax = relax_options(opts.k_max);
  const bool need_exact = spec.wants(Output::exact) ||
                          spec.wants(Output::pa_fraction);
  const bool need_relaxed = spec.wants(Output::relaxed);

  auto keys = [&](std::size_t i) -> std::vector<Cell> {
    return {spec.r_values[i / n_det],
            std::string(to_string(spec.detectors[i % n_det]))};
  };
  auto body = [&](std::size_t i) -> std::vector<Cell> {
    const double rate = spec.r_values[i / n_det];
    const Detector det = spec.detectors[i % n_det];
    const SystemParams theta = spec.theta_base.with_rate(rate);
    std::vector<Cell> row(10);  // M_star .. power_residual
    std::optional<Optimum> exact;
    std::optional<RelaxedOptimum> relaxed;
    if (need_exact) exact = optimize_exact(theta, det, exact_opts);
    if (need_relaxed) relaxed = minimize_relaxed(theta, det, relax);
    if (spec.wants(Output::exact)) {
      row[0] = exact->m_star;
      row[1] = exact->k_star;
      row[2] = exact->zeta_star;
    }
    if (relaxed) row[3] = relaxed->zeta;
    if (spec.wants(Output::exact) && relaxed) {
      row[4] = exact->zeta_star / relaxed->zeta;
    }
    if (spec.wants(Output::pa_fraction)) {
      row[5] = exact->report.pa_fraction;
      row[6] = exact->report.power_pa;
      row[7] = exact->report.power_bs_antennas;
      row[8] = exact->report.power_user_circuits;
      row[9] = exact->report.power_residual;
    }
    if (spec.wants(Output::trajectory)) {
      if (det == Detector::mrc && rate > *spec.trajectory_c) {
        const TrajectorySpec ts{*spec.trajectory_c, spec.theta_base};
        row.emplace_back(trajectory_point(ts, rate).zeta);
      } else {
        row.emplace_back(std::monostate{});
      }
    }
    if (spec.wants(Output::comparison)) {
      const double z_mrc = minimize_relaxed(theta, Detector::mrc, relax).zeta;
      const double z_zf = minimize_relaxed(theta, Detector::zf, relax).zeta;
      row.emplace_back(z_mrc < z_zf);
    }
    return row;
  };
  return build_table(std::move(header), n_rows, opts.threads, keys, body);
}

Table run_optimize(const Config& cfg, const RunOptions& opts) {
  if (!cfg.rate) config_error("optimize needs 'rate'");
  SweepSpec spec;
  spec.r_values = {*cfg.rate};
  spec.theta_base = cfg.theta_base;
  spec.detectors = cfg.detectors;
  spec.outputs = {Output::exact, Output::relaxed, Output::pa_fraction};
  RunOptions o = opts;
  o.k_max = effective_k_max(cfg, opts);
  return run_sweep(spec, o);
}

Table run_breakdown(const Config& cfg, const RunOptions& opts) {
  const std::vector<double> rates = rates_or_single(cfg, "breakdown");
  if (cfg.detectors.empty()) config_error("detector set is empty");
  const std::size_t n_det = cfg.detectors.size();
  ExactOptions exact_opts;
  exact_opts.k_max = effective_k_max(cfg, opts);
  return build_table(
      {"R", "detector", "M_star", "K_star", "zeta_star", "gamma", "power_pa",
       "power_bs", "power_users", "power_residual", "total_power",
       "pa_fraction", "error"},
      rates.size() * n_det, opts.threads,
      [&](std::size_t i) -> std::vector<Cell> {
        return {rates[i / n_det],
                std::string(to_string(cfg.detectors[i % n_det]))};
      },
      [&](std::size_t i) -> std::vector<Cell> {
        const SystemParams theta = cfg.theta_base.with_rate(rates[i / n_det]);
        const Optimum o =
            optimize_exact(theta, cfg.detectors[i % n_det], exact_opts);
        const EfficiencyReport& r = o.report;
        return {o.m_star,           o.k_star,          o.zeta_star,
                r.gamma,            r.power_pa,        r.power_bs_antennas,
                r.power_user_circuits, r.power_residual, r.total_power,
                r.pa_fraction};
      });
}

Table run_trajectory(const Config& cfg, const RunOptions& opts) {
  if (!cfg.trajectory_c) config_error("trajectory needs a 'trajectory' section");
  std::vector<double> rates = cfg.trajectory_rates;
  if (rates.empty()) rates = rates_or_single(cfg, "trajectory");
  const TrajectorySpec spec{*cfg.trajectory_c, cfg.theta_base};
  const RelaxOptions relax = relax_options(effective_k_max(cfg, opts));
  return build_table(
      {"R", "c", "K_tilde", "M_tilde", "zeta_trajectory", "zeta_limit",
       "zeta_relaxed_mrc", "error"},
      rates.size(), opts.threads,
      [&](std::size_t i) -> std::vector<Cell> {
        return {rates[i], spec.c};
      },
      [&](std::size_t i) -> std::vector<Cell> {
        const TrajectoryPoint pt = trajectory_point(spec, rates[i]);
        const double limit = trajectory_limit(spec);
        const double relaxed =
            minimize_relaxed(cfg.theta_base.with_rate(rates[i]), Detector::mrc,
                             relax)
                .zeta;
        return {pt.k_tilde, pt.m_tilde, pt.zeta, limit, relaxed};
      });
}

Table run_thresholds(const Config& cfg, const RunOptions& opts) {
  std::vector<double> rates;
  if (cfg.sweep) {
    rates = cfg.sweep->r_values;
  } else if (cfg.rate) {
    rates = {*cfg.rate};
  }
  const RelaxOptions relax = relax_options(effective_k_max(cfg, opts));
  const std::vector<std::string> header{
      "R",           "R1",    "R2",          "hypotheses_met",
      "zeta_relaxed_mrc", "zeta_relaxed_zf", "bound", "bound_holds", "error"};
  if (rates.empty()) {
    const Thresholds th = thresholds(cfg.theta_base);
    Table t;
    t.header = header;
    std::vector<Cell> row{std::monostate{}, th.r1, th.r2};
    row.resize(header.size());
    t.rows.push_back(std::move(row));
    return t;
  }
  return build_table(
      header, rates.size(), opts.threads,
      [&](std::size_t i) -> std::vector<Cell> { return {rates[i]}; },
      [&](std::size_t i) -> std::vector<Cell> {
        const SystemParams theta = cfg.theta_base.with_rate(rates[i]);
        const Thresholds th = thresholds(theta);
        std::vector<Cell> row{th.r1, th.r2, theta.rate > th.max()};
        if (theta.rate > th.max()) {
          const MrcBoundReport rep = mrc_upper_bound_report(theta, relax);
          row.insert(row.end(), {rep.zeta_mrc, rep.zeta_zf, rep.bound, rep.holds});
        }
        return row;
      });
}

Table run_validation(std::span<const McConfig> configs, const RunOptions& opts) {
  if (configs.empty()) config_error("montecarlo configs is empty");
  std::vector<McConfig> family(configs.begin(), configs.end());
  if (opts.seed) {
    for (McConfig& c : family) c.seed = *opts.seed;
  }
  // Monte-Carlo trials are the parallel axis; rows run one after another.
  Table t;
  t.header = {"m",          "k",           "detector",   "gamma",
              "trials",     "seed",        "empirical_rate", "ci_halfwidth",
              "bound_rate", "margin",      "resampled_trials", "error"};
  for (const McConfig& c : family) {
    std::vector<Cell> row{c.m, c.k, std::string(to_string(c.detector)),
                          c.gamma, c.trials, std::to_string(c.seed)};
    try {
      const McResult r = simulate(c, opts.threads);
      row.insert(row.end(), {r.empirical_rate, r.ci_halfwidth, r.bound_rate,
                             r.margin, r.resampled_trials, std::monostate{}});
    } catch (const Error& e) {
      row.resize(t.header.size() - 1);
      row.emplace_back(error_text(e));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table run_validation(const Config& cfg, const RunOptions& opts) {
  if (cfg.montecarlo.empty()) config_error("validate needs a 'montecarlo' section");
  return run_validation(std::span<const McConfig>(cfg.montecarlo), opts);
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < table.header.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
              obj[table.header[i]] = nullptr;
            } else {
              obj[table.header[i]] = v;
            }
          },
          row[i]);
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

}  // namespace eemimo::report
