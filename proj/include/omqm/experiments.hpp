// Named experiments, flat key = value configuration, and JSON reports.
//
// A run resolves its configuration in three layers (preset, config file,
// command-line overrides), executes one experiment or all of them, writes one
// CSV per data product plus one JSON report into the output directory, and
// carries a pass/fail verdict for every metric.
//
// Exit-code contract: 0 all metrics pass, 1 assertion failure, 2 config or
// input error, 3 numeric error.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include "omqm/closed_form.hpp"
#include "omqm/dynamics.hpp"
#include "omqm/errors.hpp"
#include "omqm/multidim.hpp"
#include "omqm/params.hpp"
#include "omqm/pathint.hpp"
#include "omqm/quanta.hpp"
#include "omqm/stochastic.hpp"

namespace omqm::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitAssertion = 1, kExitConfig = 2, kExitNumeric = 3 };

// Acceptance thresholds.
namespace tol {
inline constexpr double kZMax = 3.0;              // standard errors
inline constexpr double kKsAlpha = 0.01;
inline constexpr double kSemigroup = 1e-8;
inline constexpr double kConvergenceLo = 1.7;
inline constexpr double kConvergenceHi = 2.3;
inline constexpr double kVariationalRel = 1e-4;
inline constexpr double kWick = 1e-10;
inline constexpr double kCollapse = 1e-10;
inline constexpr double kGroundState = 1e-12;
inline constexpr double kIsoentropic = 1e-12;
inline constexpr double kFixedPoint = 1e-9;
inline constexpr double kMass = 1e-8;
}  // namespace tol

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "stationary", "transition", "chapman-kolmogorov", "path-integral", "minimize",
      "wick-identity", "isoentropic", "quanta", "all"};
  return names;
}

struct KeySpec {
  std::string name;
  std::string help;
};

// Every recognised configuration key. Empty value means "derive".
inline const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = {
      {"R", "Onsager resistance R > 0 (thermo side; excludes m/omega)"},
      {"s", "entropy curvature s > 0 (thermo side; excludes m/omega)"},
      {"m", "oscillator mass m > 0 (quantum side; excludes R/s)"},
      {"omega", "oscillator angular frequency > 0 (quantum side; excludes R/s)"},
      {"k_B", "Boltzmann constant > 0 [1]"},
      {"hbar", "Planck constant > 0 [1]"},
      {"c", "speed of light for the Compton wavelength [1]"},
      {"seed", "RNG seed [42]"},
      {"out", "output directory [.]"},
      {"dt", "SDE time step, must be < 0.1/gamma [0.005/gamma]"},
      {"n_paths", "ensemble size [100000]"},
      {"burn_in", "relaxation time before stationary sampling, >= 10/gamma [10/gamma]"},
      {"lag", "single transition lag; unset runs lags {0.1, ln 2, 5}/gamma"},
      {"x1", "transition start / minimizer left endpoint [1]"},
      {"x2", "minimizer right endpoint [1]"},
      {"total_a", "reduced lag gamma*(tau2 - tau1) for kernels and minimizer [1]"},
      {"n_steps", "minimizer time steps [2000]"},
      {"grid_points", "spatial grid points [401]"},
      {"grid_half_width", "spatial grid half-width [8 sqrt(k_B/s)]"},
      {"eps_caustic", "caustic threshold on |sin(omega dt)| [1e-8]"},
      {"mass", "particle mass for the quanta calculator [1]"},
      {"temperature", "temperature for time-temperature reciprocity [1]"},
      {"quanta_N", "entropy quantum count N >= 0 [1]"},
      {"quanta_n", "dimensionless multiplier n > 0 of the entropy increase [1]"},
  };
  return keys;
}

using KeyValues = std::map<std::string, std::string>;

inline bool is_known_key(const std::string& k) {
  const auto& keys = config_keys();
  return std::any_of(keys.begin(), keys.end(), [&](const KeySpec& s) { return s.name == k; });
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// Flat "key = value" text; '#' starts a comment.
inline KeyValues parse_config_text(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!is_known_key(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    }
    kv[key] = value;
  }
  return kv;
}

inline KeyValues parse_config_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open config file " + p.string());
  return parse_config_text(in);
}

// "unit": R = s = k_B = hbar = 1; the quantum side follows from the dictionary.
inline KeyValues preset(const std::string& name) {
  if (name == "unit") return {{"R", "1"}, {"s", "1"}, {"k_B", "1"}, {"hbar", "1"}, {"c", "1"}};
  throw ConfigError("unknown preset '" + name + "'");
}

// Later layers override earlier ones.
inline KeyValues merge(std::initializer_list<KeyValues> layers) {
  KeyValues out;
  for (const auto& layer : layers)
    for (const auto& [k, v] : layer) out[k] = v;
  return out;
}

struct NumericConfig {
  double dt = 0.0;
  std::size_t n_paths = 100000;
  double burn_in = 0.0;
  std::optional<double> lag;
  double x1 = 1.0;
  double x2 = 1.0;
  double total_a = 1.0;
  std::size_t n_steps = 2000;
  GridSpec grid;
  double eps_caustic = kDefaultCausticEpsilon;
};

struct QuantaInput {
  double mass = 1.0;
  double temperature = 1.0;
  std::int64_t N = 1;
  double n = 1.0;
};

struct ExperimentConfig {
  std::string experiment;
  ThermoParams thermo{1.0, 1.0, 1.0};
  QuantumParams quantum{0.5, 1.0, 1.0};
  bool quantum_given = false;  // true when the quantum side was the input
  PhysicalConstants constants{1.0, 1.0, 1.0};
  NumericConfig numeric;
  QuantaInput quanta;
  std::uint64_t seed = 42;
  std::filesystem::path output = ".";
  KeyValues resolved;  // echo of every key after defaults
};

namespace detail {

inline double parse_double(const KeyValues& kv, const std::string& key, double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size() || !std::isfinite(v)) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' is not a finite number: " + it->second);
  }
}

inline std::int64_t parse_int(const KeyValues& kv, const std::string& key, std::int64_t fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' is not an integer: " + it->second);
  }
}

inline std::size_t parse_count(const KeyValues& kv, const std::string& key, std::size_t fallback) {
  const auto v = parse_int(kv, key, static_cast<std::int64_t>(fallback));
  if (v <= 0) throw ConfigError("'" + key + "' must be a positive integer");
  return static_cast<std::size_t>(v);
}

inline double positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError("'" + key + "' must be > 0");
  return v;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

inline ExperimentConfig build_config(const std::string& experiment, const KeyValues& kv) {
  if (std::find(experiment_names().begin(), experiment_names().end(), experiment) ==
      experiment_names().end()) {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  for (const auto& [k, v] : kv) {
    if (!is_known_key(k)) throw ConfigError("unknown key '" + k + "'");
  }
  using detail::parse_double;
  using detail::positive;

  ExperimentConfig cfg;
  cfg.experiment = experiment;

  const bool thermo_given = kv.count("R") || kv.count("s");
  const bool quantum_given = kv.count("m") || kv.count("omega");
  if (thermo_given && quantum_given) {
    throw ConfigError("give either the thermo side (R, s) or the quantum side (m, omega), not both");
  }
  if (!thermo_given && !quantum_given) {
    throw ConfigError("no parameters: set R and s, or m and omega, or use --preset unit");
  }
  const double k_B = positive(parse_double(kv, "k_B", 1.0), "k_B");
  const double hbar = positive(parse_double(kv, "hbar", 1.0), "hbar");
  const double c = positive(parse_double(kv, "c", 1.0), "c");
  if (thermo_given) {
    if (!kv.count("R") || !kv.count("s")) throw ConfigError("thermo side needs both R and s");
    cfg.thermo = ThermoParams(positive(parse_double(kv, "R", 0), "R"),
                              positive(parse_double(kv, "s", 0), "s"), k_B);
    cfg.quantum = to_quantum(cfg.thermo, hbar);
  } else {
    if (!kv.count("m") || !kv.count("omega")) throw ConfigError("quantum side needs both m and omega");
    cfg.quantum = QuantumParams(positive(parse_double(kv, "m", 0), "m"),
                                positive(parse_double(kv, "omega", 0), "omega"), hbar);
    cfg.thermo = to_thermo(cfg.quantum, k_B);
    cfg.quantum_given = true;
  }
  cfg.constants = PhysicalConstants(c, k_B, hbar);

  const double g = cfg.thermo.gamma();
  auto& n = cfg.numeric;
  n.dt = positive(parse_double(kv, "dt", kDefaultDt / g), "dt");
  if (!(n.dt < 0.1 / g)) throw ConfigError("dt must be < 0.1/gamma = " + detail::fmt(0.1 / g));
  n.n_paths = detail::parse_count(kv, "n_paths", n.n_paths);
  n.burn_in = positive(parse_double(kv, "burn_in", 10.0 / g), "burn_in");
  if (n.burn_in < 10.0 / g * (1.0 - 1e-12)) throw ConfigError("burn_in must be >= 10/gamma");
  if (kv.count("lag")) n.lag = positive(parse_double(kv, "lag", 0), "lag");
  n.x1 = parse_double(kv, "x1", n.x1);
  n.x2 = parse_double(kv, "x2", n.x2);
  n.total_a = positive(parse_double(kv, "total_a", n.total_a), "total_a");
  n.n_steps = detail::parse_count(kv, "n_steps", n.n_steps);
  if (n.n_steps < 2) throw ConfigError("n_steps must be >= 2");
  n.grid = default_grid(cfg.thermo);
  n.grid.points = detail::parse_count(kv, "grid_points", n.grid.points);
  if (n.grid.points < 3) throw ConfigError("grid_points must be >= 3");
  n.grid.half_width = positive(parse_double(kv, "grid_half_width", n.grid.half_width), "grid_half_width");
  n.eps_caustic = positive(parse_double(kv, "eps_caustic", n.eps_caustic), "eps_caustic");

  cfg.quanta.mass = positive(parse_double(kv, "mass", 1.0), "mass");
  cfg.quanta.temperature = positive(parse_double(kv, "temperature", 1.0), "temperature");
  cfg.quanta.N = detail::parse_int(kv, "quanta_N", 1);
  if (cfg.quanta.N < 0) throw ConfigError("quanta_N must be >= 0");
  cfg.quanta.n = positive(parse_double(kv, "quanta_n", 1.0), "quanta_n");

  const auto seed = detail::parse_int(kv, "seed", 42);
  if (seed < 0) throw ConfigError("seed must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  if (auto it = kv.find("out"); it != kv.end()) cfg.output = it->second;

  using detail::fmt;
  cfg.resolved = {
      {"R", fmt(cfg.thermo.R())},          {"s", fmt(cfg.thermo.s())},
      {"k_B", fmt(k_B)},                   {"hbar", fmt(hbar)},
      {"c", fmt(c)},                       {"m", fmt(cfg.quantum.m())},
      {"omega", fmt(cfg.quantum.omega())}, {"seed", std::to_string(cfg.seed)},
      {"dt", fmt(n.dt)},                   {"n_paths", std::to_string(n.n_paths)},
      {"burn_in", fmt(n.burn_in)},         {"lag", n.lag ? fmt(*n.lag) : "standard"},
      {"x1", fmt(n.x1)},                   {"x2", fmt(n.x2)},
      {"total_a", fmt(n.total_a)},         {"n_steps", std::to_string(n.n_steps)},
      {"grid_points", std::to_string(n.grid.points)},
      {"grid_half_width", fmt(n.grid.half_width)},
      {"eps_caustic", fmt(n.eps_caustic)}, {"mass", fmt(cfg.quanta.mass)},
      {"temperature", fmt(cfg.quanta.temperature)},
      {"quanta_N", std::to_string(cfg.quanta.N)},
      {"quanta_n", fmt(cfg.quanta.n)},
      {"input_side", cfg.quantum_given ? "quantum" : "thermo"},
  };
  return cfg;
}

// ---------------------------------------------------------------------------
// Reports

enum class Rule { less, less_equal, greater_equal, within };

struct Metric {
  std::string name;
  double value = 0.0;
  Rule rule = Rule::less;
  double lo = 0.0;  // threshold, or lower bound for Rule::within
  double hi = 0.0;  // upper bound for Rule::within

  bool pass() const {
    if (!std::isfinite(value)) return false;
    switch (rule) {
      case Rule::less: return value < lo;
      case Rule::less_equal: return value <= lo;
      case Rule::greater_equal: return value >= lo;
      case Rule::within: return value >= lo && value <= hi;
    }
    return false;
  }
};

struct Report {
  std::string experiment;
  KeyValues inputs;
  std::vector<Metric> metrics;
  std::vector<std::string> files;
  std::uint64_t seed = 0;

  bool passed() const {
    return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass(); });
  }

  void add(std::string name, double value, Rule rule, double lo, double hi = 0.0) {
    metrics.push_back({std::move(name), value, rule, lo, hi});
  }

  const Metric* find(const std::string& name) const {
    for (const auto& m : metrics)
      if (m.name == name) return &m;
    return nullptr;
  }
};

inline std::string rule_symbol(Rule r) {
  switch (r) {
    case Rule::less: return "<";
    case Rule::less_equal: return "<=";
    case Rule::greater_equal: return ">=";
    case Rule::within: return "within";
  }
  return "?";
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Keys are sorted (nlohmann::json default), so two runs differ only in
// "timestamp".
inline nlohmann::json to_json(const Report& r, const std::string& timestamp) {
  nlohmann::json j;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["inputs"] = r.inputs;
  j["files"] = r.files;
  j["versions"] = {{"omqm", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"boost", BOOST_LIB_VERSION}};
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& m : r.metrics) {
    nlohmann::json e{{"value", m.value}, {"rule", rule_symbol(m.rule)}, {"pass", m.pass()}};
    if (m.rule == Rule::within) {
      e["tolerance"] = {m.lo, m.hi};
    } else {
      e["tolerance"] = m.lo;
    }
    metrics[m.name] = e;
  }
  j["metrics"] = metrics;
  j["passed"] = r.passed();
  j["timestamp"] = timestamp;
  return j;
}

// ---------------------------------------------------------------------------
// Experiments

namespace detail {

class OutputSink {
 public:
  OutputSink(const std::filesystem::path& dir, Report& rep) : dir_(dir), rep_(rep) {}

  template <class Writer>
  void csv(const std::string& name, Writer&& write) {
    std::filesystem::create_directories(dir_);
    std::ofstream os(dir_ / name);
    if (!os) throw ConfigError("cannot write " + (dir_ / name).string());
    write(os);
    rep_.files.push_back(name);
  }

 private:
  std::filesystem::path dir_;
  Report& rep_;
};

inline std::string lag_label(double a) {
  std::ostringstream os;
  os << std::setprecision(4) << a;
  return os.str();
}

inline void run_stationary(const ExperimentConfig& cfg, Report& rep, OutputSink& out) {
  const auto& tp = cfg.thermo;
  const auto& n = cfg.numeric;
  const EnsembleStats st = ensemble_stationary_stats(tp, n.n_paths, n.burn_in, cfg.seed, n.dt);
  const double target = tp.stationary_variance();
  rep.add("stationary.variance", st.variance, Rule::within, target - tol::kZMax * st.variance_se,
          target + tol::kZMax * st.variance_se);
  rep.add("stationary.variance_z", std::abs(st.variance - target) / st.variance_se,
          Rule::less_equal, tol::kZMax);
  rep.add("stationary.mean_z", std::abs(st.mean) / st.mean_se, Rule::less_equal, tol::kZMax);
  rep.add("stationary.histogram_count_mismatch",
          std::abs(static_cast<double>(st.histogram.total()) - static_cast<double>(st.count)),
          Rule::less_equal, 0.0);
  out.csv("stationary_histogram.csv", [&](std::ostream& os) { write_histogram_csv(os, st.histogram); });
}

inline void run_transition(const ExperimentConfig& cfg, Report& rep, OutputSink& out) {
  const auto& tp = cfg.thermo;
  const auto& n = cfg.numeric;
  const double g = tp.gamma();
  std::vector<double> lags;
  if (n.lag) {
    lags = {*n.lag};
  } else {
    lags = {0.1 / g, std::numbers::ln2 / g, 5.0 / g};
  }
  for (double lag : lags) {
    const TransitionReport tr =
        empirical_transition_check(tp, n.x1, lag, n.n_paths, cfg.seed, std::min(n.dt, lag / 10.0),
                                   {}, tol::kKsAlpha);
    const std::string tag = "transition[a=" + lag_label(g * lag) + "].";
    rep.add(tag + "ks_p_value", tr.p_value, Rule::greater_equal, tol::kKsAlpha);
    rep.add(tag + "mean_z", tr.mean_z(), Rule::less_equal, tol::kZMax);
    out.csv("transition_histogram_a" + lag_label(g * lag) + ".csv",
            [&](std::ostream& os) { write_histogram_csv(os, tr.stats.histogram); });
  }
}

inline void run_chapman_kolmogorov(const ExperimentConfig& cfg, Report& rep, OutputSink& out) {
  const auto& tp = cfg.thermo;
  const auto& n = cfg.numeric;
  const GridKernel whole = compose_kernel(tp, n.total_a, 1, n.grid);
  for (std::size_t slices : {2u, 4u, 8u}) {
    const GridKernel comp = compose_kernel(tp, n.total_a, slices, n.grid);
    rep.add("chapman-kolmogorov.sup_norm[n=" + std::to_string(slices) + "]",
            reference_sup_norm(comp, whole), Rule::less, tol::kSemigroup);
  }

  // Long-time collapse onto the stationary law from x1 = 0.
  double collapse = 0.0;
  for (std::size_t i = 0; i < n.grid.points; ++i) {
    const double x = n.grid.x(i);
    collapse = std::max(collapse, std::abs(transition_density(tp, x, 0.0, 20.0) -
                                           stationary_density(tp, x)));
  }
  rep.add("chapman-kolmogorov.long_time_collapse", collapse, Rule::less, tol::kCollapse);

  // Stationary law is a fixed point of one-gate propagation.
  std::vector<double> f1(n.grid.points);
  for (std::size_t i = 0; i < f1.size(); ++i) f1[i] = stationary_density(tp, n.grid.x(i));
  const auto f2 = propagate_onegate(tp, n.grid, f1, n.total_a);
  double fixed = 0.0;
  for (std::size_t i = 0; i < f1.size(); ++i) fixed = std::max(fixed, std::abs(f2[i] - f1[i]));
  rep.add("chapman-kolmogorov.stationary_fixed_point", fixed, Rule::less, tol::kFixedPoint);
  rep.add("chapman-kolmogorov.mass_error",
          std::abs(quad::trapezoid(f2, n.grid.spacing()) - 1.0), Rule::less, tol::kMass);

  out.csv("ck_kernel.csv", [&](std::ostream& os) { write_kernel_csv(os, whole); });
}

inline void run_path_integral(const ExperimentConfig& cfg, Report& rep, OutputSink& out) {
  const auto& tp = cfg.thermo;
  const auto& n = cfg.numeric;
  const GridKernel exact = compose_kernel(tp, n.total_a, 1, n.grid);
  const std::vector<std::size_t> slices = {16, 32, 64};
  std::vector<double> errs;
  for (auto k : slices) {
    errs.push_back(reference_sup_norm(
        compose_kernel(tp, n.total_a, k, n.grid, ShortTimeKernel::euler), exact));
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    rep.add("path-integral.error_ratio[" + std::to_string(slices[i]) + "->" +
                std::to_string(slices[i + 1]) + "]",
            errs[i] / errs[i + 1], Rule::within, tol::kConvergenceLo, tol::kConvergenceHi);
  }
  out.csv("path_integral_convergence.csv", [&](std::ostream& os) {
    os << "n_slices,sup_error\n" << std::setprecision(17);
    for (std::size_t i = 0; i < slices.size(); ++i) os << slices[i] << ',' << errs[i] << '\n';
  });
}

inline double relative_error(double value, double reference) {
  if (reference == 0.0) return std::abs(value);
  return std::abs(value - reference) / std::abs(reference);
}

inline void run_minimize(const ExperimentConfig& cfg, Report& rep, OutputSink& out) {
  const auto& tp = cfg.thermo;
  const auto& n = cfg.numeric;
  const double g = tp.gamma();
  const double tau2 = n.total_a / g;

  // 5 x 5 endpoint grid.
  double worst = 0.0;
  for (int i = -2; i <= 2; ++i) {
    for (int j = -2; j <= 2; ++j) {
      const auto res = minimize_action(tp, i, 0.0, j, tau2, n.n_steps);
      worst = std::max(worst, relative_error(res.action.exponent(tp.k_B()),
                                             analytic_min_exponent(tp, i, j, n.total_a)));
    }
  }
  rep.add("minimize.endpoint_grid_rel_error", worst, Rule::less, tol::kVariationalRel);

  // One gate: tau1 = tau2 - 40/gamma stands in for -infinity.
  const auto one = minimize_action(tp, 0.0, -40.0 / g, n.x2, 0.0, n.n_steps);
  rep.add("minimize.onegate_rel_error",
          relative_error(one.action.exponent(tp.k_B()), extremal_onegate_exponent(tp, n.x2)),
          Rule::less, tol::kVariationalRel);

  // Configured endpoints against A e^{gamma tau} + B e^{-gamma tau}.
  const auto res = minimize_action(tp, n.x1, 0.0, n.x2, tau2, n.n_steps);
  const double det = std::exp(g * tau2) - std::exp(-g * tau2);
  const double A = (n.x2 - n.x1 * std::exp(-g * tau2)) / det;
  const double B = n.x1 - A;
  double sup = 0.0;
  for (std::size_t k = 0; k < res.path.size(); ++k) {
    const double t = res.path.times()[k];
    sup = std::max(sup, std::abs(res.path.values()[k] - (A * std::exp(g * t) + B * std::exp(-g * t))));
  }
  rep.add("minimize.path_sup_error", sup, Rule::less, tol::kVariationalRel);
  rep.add("minimize.rel_error",
          relative_error(res.action.exponent(tp.k_B()),
                         analytic_min_exponent(tp, n.x1, n.x2, n.total_a)),
          Rule::less, tol::kVariationalRel);
  out.csv("minimize_path.csv", [&](std::ostream& os) { write_path_csv(os, res.path); });
}

inline void run_wick_identity(const ExperimentConfig& cfg, Report& rep, OutputSink& out) {
  const auto& tp = cfg.thermo;
  const double hbar = cfg.constants.hbar();
  const QuantumParams qp = to_quantum(tp, hbar);
  const double w = qp.omega();
  const std::vector<double> phases = {0.3, 0.9, 1.5, 2.2, 2.9};

  struct Row { double t, x1, x2, res; };
  std::vector<Row> rows;
  double worst = 0.0;
  for (double ph : phases) {
    for (int i = 0; i < 21; ++i) {
      for (int j = 0; j < 21; ++j) {
        const double x1 = -2.0 + 0.2 * i;
        const double x2 = -2.0 + 0.2 * j;
        const double r = std::abs(
            wick_identity_residual(tp, hbar, x2, x1, ph / w, cfg.numeric.eps_caustic));
        worst = std::max(worst, r);
        rows.push_back({ph / w, x1, x2, r});
      }
    }
  }
  rep.add("wick-identity.max_residual", worst, Rule::less, tol::kWick);

  // Caustic inputs must raise, not return NaN.
  double raised = 0.0;
  for (double ph : {std::numbers::pi, 2.0 * std::numbers::pi}) {
    try {
      (void)feynman_propagator(qp, 0.1, ph / w, 0.2, 0.0, cfg.numeric.eps_caustic);
    } catch (const CausticError&) {
      raised += 1.0;
    }
  }
  rep.add("wick-identity.caustics_raised", raised, Rule::greater_equal, 2.0);

  double gs = 0.0;
  for (std::size_t i = 0; i < cfg.numeric.grid.points; ++i) {
    const double x = cfg.numeric.grid.x(i);
    gs = std::max(gs, std::abs(ground_state_density(qp, x) - stationary_density(tp, x)));
  }
  rep.add("wick-identity.ground_state_sup_norm", gs, Rule::less, tol::kGroundState);

  out.csv("wick_residuals.csv", [&](std::ostream& os) {
    os << "t,x1,x2,abs_residual\n" << std::setprecision(17);
    for (const auto& r : rows) os << r.t << ',' << r.x1 << ',' << r.x2 << ',' << r.res << '\n';
  });
}

inline void run_isoentropic(const ExperimentConfig& cfg, Report& rep, OutputSink& out) {
  const auto& tp = cfg.thermo;
  std::vector<SpherePoint> all;
  double worst = 0.0;
  for (double rho : {0.1, 1.0, 10.0}) {
    auto pts = sample_isoentropic_sphere(tp, rho, 1000, cfg.seed);
    for (const auto& p : pts) worst = std::max(worst, std::abs(p.value - rho * rho));
    all.insert(all.end(), pts.begin(), pts.end());
  }
  rep.add("isoentropic.max_abs_error", worst, Rule::less, tol::kIsoentropic);

  // Equipotential spheres of the dual oscillator: potential constant on |q| = r.
  const QuantumParams qp = to_quantum(tp, cfg.constants.hbar());
  const double r = onshell_sphere_radius(tp, 1.0);
  const auto eq = sample_equipotential_sphere(qp, r, 1000, cfg.seed + 1);
  double vmin = eq.front().value, vmax = eq.front().value;
  for (const auto& p : eq) {
    vmin = std::min(vmin, p.value);
    vmax = std::max(vmax, p.value);
  }
  rep.add("isoentropic.equipotential_spread", (vmax - vmin) / vmax, Rule::less, tol::kIsoentropic);
  rep.add("isoentropic.radius_ratio_error",
          std::abs(1.0 / r - std::numbers::sqrt2 * qp.omega()), Rule::less, tol::kIsoentropic);
  out.csv("isoentropic_sphere.csv", [&](std::ostream& os) { write_sphere_csv(os, all); });
}

inline void run_quanta(const ExperimentConfig& cfg, Report& rep, OutputSink& out) {
  const auto& pc = cfg.constants;
  const auto& q = cfg.quanta;
  const PhysicalConstants pc2(pc.c(), pc.k_B(), 2.0 * pc.hbar());

  const double t = time_from_temperature(pc, q.temperature);
  const double lc = compton_wavelength(pc, q.mass);
  const double dS = entropy_increase(cfg.thermo, pc, q.mass, q.n);
  const SecondLawReport sl = second_law_quantum(pc, q.N);

  rep.add("quanta.time_scaling_error",
          std::abs(time_from_temperature(pc2, q.temperature) - 2.0 * t), Rule::less_equal, 0.0);
  rep.add("quanta.compton_scaling_error",
          std::abs(compton_wavelength(pc2, q.mass) - 2.0 * lc), Rule::less_equal, 0.0);
  rep.add("quanta.entropy_hbar_scaling_error",
          std::abs(entropy_increase(cfg.thermo, pc2, q.mass, q.n) - 4.0 * dS), Rule::less_equal, 0.0);
  rep.add("quanta.entropy_mass_scaling_error",
          std::abs(entropy_increase(cfg.thermo, pc, 0.5 * q.mass, q.n) - 4.0 * dS),
          Rule::less_equal, 0.0);
  rep.add("quanta.reciprocity_error", std::abs(t * (pc.k_B() / pc.hbar()) * q.temperature - 1.0),
          Rule::less, 1e-15);
  rep.add("quanta.second_law_multiple_error",
          std::abs(sl.delta_S - static_cast<double>(q.N) * pc.k_B()), Rule::less_equal, 0.0);
  rep.add("quanta.entropy_increase_positive", dS, Rule::greater_equal,
          std::numeric_limits<double>::min());

  out.csv("quanta.csv", [&](std::ostream& os) {
    os << "quantity,value\n" << std::setprecision(17);
    os << "time_from_temperature," << t << '\n';
    os << "compton_wavelength," << lc << '\n';
    os << "entropy_increase," << dS << '\n';
    os << "second_law_delta_S," << sl.delta_S << '\n';
    os << "second_law_at_least_one_quantum," << (sl.at_least_one_quantum ? 1 : 0) << '\n';
    os << "uncertainty_bound," << sl.uncertainty_bound << '\n';
  });
}

using Runner = void (*)(const ExperimentConfig&, Report&, OutputSink&);

inline const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"stationary", run_stationary},
      {"transition", run_transition},
      {"chapman-kolmogorov", run_chapman_kolmogorov},
      {"path-integral", run_path_integral},
      {"minimize", run_minimize},
      {"wick-identity", run_wick_identity},
      {"isoentropic", run_isoentropic},
      {"quanta", run_quanta},
  };
  return table;
}

}  // namespace detail

// Runs the configured experiment and writes CSV files plus
// <experiment>_report.json into cfg.output.
inline Report run(const ExperimentConfig& cfg) {
  Report rep;
  rep.experiment = cfg.experiment;
  rep.inputs = cfg.resolved;
  rep.seed = cfg.seed;
  detail::OutputSink sink(cfg.output, rep);
  if (cfg.experiment == "all") {
    for (const auto& name : experiment_names()) {
      if (name == "all") continue;
      detail::runners().at(name)(cfg, rep, sink);
    }
  } else {
    detail::runners().at(cfg.experiment)(cfg, rep, sink);
  }
  std::filesystem::create_directories(cfg.output);
  const std::string report_name = cfg.experiment + "_report.json";
  rep.files.push_back(report_name);
  std::ofstream os(cfg.output / report_name);
  if (!os) throw ConfigError("cannot write report into " + cfg.output.string());
  os << to_json(rep, utc_timestamp()).dump(2) << '\n';
  return rep;
}

inline int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::numeric ? kExitNumeric : kExitConfig;
}

}  // namespace omqm::cli
