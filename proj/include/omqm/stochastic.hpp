// Ensemble simulation of the fluctuating linear law
//
//   R dx/dtau + s x = F_r,   <F_r(tau) F_r(tau')> = 2 k_B R delta(tau - tau'),
//
// i.e. dx = -gamma x dtau + sigma dW with sigma = sqrt(2 k_B / R). This noise
// intensity is the one whose stationary law has variance k_B / s; any other
// choice breaks the Gaussian equilibrium law.
//
// Every path draws from its own generator seeded by (seed, path index), so
// ensemble results do not depend on thread count or scheduling.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "omqm/closed_form.hpp"
#include "omqm/errors.hpp"
#include "omqm/params.hpp"

namespace omqm {

// Discretized trajectory on a strictly increasing time grid.
class Path {
 public:
  Path() = default;
  Path(std::vector<double> times, std::vector<double> values)
      : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() != values_.size()) {
      throw GridError("path times and values differ in length");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
      if (!std::isfinite(times_[i]) || !std::isfinite(values_[i])) {
        throw GridError("non-finite path entry at index " + std::to_string(i));
      }
      if (i > 0 && !(times_[i] > times_[i - 1])) {
        throw GridError("path times not strictly increasing at index " + std::to_string(i));
      }
    }
  }

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return times_.size(); }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

enum class Scheme {
  euler_maruyama,
  exact,  // exact Gaussian OU update; cross-check only
};

struct SimulationOptions {
  Scheme scheme = Scheme::euler_maruyama;
  bool noise = true;  // false forces sigma = 0
};

inline double noise_amplitude(const ThermoParams& tp) {
  return std::sqrt(2.0 * tp.k_B() / tp.R());
}

// Independent generator for path `index` of the ensemble seeded by `seed`.
inline std::mt19937_64 path_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), 0x6f6d716du};
  return std::mt19937_64(seq);
}

// Worker count: OM_QM_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("OM_QM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<unsigned>(std::min(n, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

inline void check_step(const ThermoParams& tp, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw StepSizeError("dt must be > 0");
  if (!(dt < 0.1 / tp.gamma())) {
    throw StepSizeError("dt = " + std::to_string(dt) + " must be below 0.1/gamma = " +
                        std::to_string(0.1 / tp.gamma()));
  }
}

// Steps needed to cover `span` with steps no longer than dt.
inline std::size_t step_count(double span, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt - 1e-9)));
}

// One-step update x -> drift * x + diffusion * xi.
struct Stepper {
  double drift;
  double diffusion;

  Stepper(const ThermoParams& tp, double dt, const SimulationOptions& opt) {
    if (opt.scheme == Scheme::exact) {
      drift = std::exp(-tp.gamma() * dt);
      diffusion = std::sqrt(transition_variance(tp, tp.gamma() * dt));
    } else {
      drift = 1.0 - tp.gamma() * dt;
      diffusion = noise_amplitude(tp) * std::sqrt(dt);
    }
    if (!opt.noise) diffusion = 0.0;
  }

  double operator()(double x, double xi) const { return drift * x + diffusion * xi; }
};

inline void check_finite(double x, std::size_t step) {
  if (!std::isfinite(x)) {
    throw NumericError("non-finite sample at step " + std::to_string(step));
  }
}

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

// Deterministic integration from x0 driven by the given standard normals,
// one per step. Returns x0 followed by one value per step.
inline std::vector<double> integrate_ou(const ThermoParams& tp, double x0, double dt,
                                        std::span<const double> normals,
                                        const SimulationOptions& opt = {}) {
  detail::check_step(tp, dt);
  const detail::Stepper step(tp, dt, opt);
  std::vector<double> xs;
  xs.reserve(normals.size() + 1);
  xs.push_back(x0);
  for (std::size_t k = 0; k < normals.size(); ++k) {
    xs.push_back(step(xs.back(), normals[k]));
    detail::check_finite(xs.back(), k + 1);
  }
  return xs;
}

// Single trajectory on [0, tau_end]. The step is shrunk to tau_end / n so the
// grid lands exactly on tau_end. Uses generator stream (seed, 0).
inline Path simulate_ou(const ThermoParams& tp, double x0, double tau_end, double dt,
                        std::uint64_t seed, const SimulationOptions& opt = {}) {
  detail::check_step(tp, dt);
  if (!(tau_end > 0.0)) throw DomainError("tau_end must be > 0");
  const std::size_t n = detail::step_count(tau_end, dt);
  const double h = tau_end / static_cast<double>(n);

  auto rng = path_stream(seed, 0);
  std::normal_distribution<double> normal;
  std::vector<double> xi(n);
  for (auto& v : xi) v = normal(rng);

  std::vector<double> times(n + 1);
  for (std::size_t k = 0; k <= n; ++k) times[k] = h * static_cast<double>(k);
  return Path(std::move(times), integrate_ou(tp, x0, h, xi, opt));
}

// Terminal values of n_paths independent trajectories started at x0. Path i
// matches simulate_ou(..., seed) for i = 0 and uses stream (seed, i) in general.
inline std::vector<double> ensemble_terminal_values(const ThermoParams& tp, double x0,
                                                    double tau_end, double dt,
                                                    std::size_t n_paths, std::uint64_t seed,
                                                    const SimulationOptions& opt = {}) {
  detail::check_step(tp, dt);
  if (!(tau_end > 0.0)) throw DomainError("tau_end must be > 0");
  if (n_paths == 0) throw DomainError("empty ensemble");
  const std::size_t n = detail::step_count(tau_end, dt);
  const double h = tau_end / static_cast<double>(n);
  const detail::Stepper step(tp, h, opt);

  std::vector<double> out(n_paths);
  detail::parallel_for(n_paths, [&](std::size_t i) {
    auto rng = path_stream(seed, i);
    std::normal_distribution<double> normal;
    double x = x0;
    for (std::size_t k = 0; k < n; ++k) {
      x = step(x, normal(rng));
      detail::check_finite(x, k + 1);
    }
    out[i] = x;
  });
  return out;
}

struct Histogram {
  std::vector<double> edges;          // bins + 1 entries
  std::vector<std::size_t> counts;    // per bin; out-of-range samples are not counted
  std::size_t overflow = 0;           // samples outside [edges.front(), edges.back())

  std::size_t total() const {
    std::size_t t = overflow;
    for (auto c : counts) t += c;
    return t;
  }
};

inline Histogram make_histogram(std::span<const double> xs, double lo, double hi,
                                std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw DomainError("histogram needs bins > 0 and hi > lo");
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  }
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double x : xs) {
    if (x < lo || x >= hi) {
      ++h.overflow;
      continue;
    }
    auto b = static_cast<std::size_t>((x - lo) / width);
    h.counts[std::min(b, bins - 1)] += 1;
  }
  return h;
}

struct EnsembleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;        // unbiased; 0 for a single sample
  double mean_se = 0.0;         // sqrt(variance / count)
  double variance_se = 0.0;     // from the sample fourth moment
  Histogram histogram;
};

inline EnsembleStats summarize(std::span<const double> xs, double hist_lo, double hist_hi,
                               std::size_t bins) {
  if (xs.empty()) throw DomainError("empty ensemble");
  EnsembleStats st;
  st.count = xs.size();
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  st.mean = sum / n;
  if (xs.size() > 1) {
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
      const double d = (x - st.mean) * (x - st.mean);
      m2 += d;
      m4 += d * d;
    }
    m2 /= n;
    m4 /= n;
    st.variance = m2 * n / (n - 1.0);
    st.mean_se = std::sqrt(st.variance / n);
    st.variance_se = std::sqrt(std::max(0.0, (m4 - m2 * m2) / n));
  }
  st.histogram = make_histogram(xs, hist_lo, hist_hi, bins);
  return st;
}

inline constexpr std::size_t kDefaultBins = 101;
inline constexpr double kDefaultDt = 0.005;  // in units of 1/gamma

// Terminal-value statistics after relaxing from x0 = 0 for burn_in.
// Histogram: 101 bins over +-6 stationary standard deviations.
inline EnsembleStats ensemble_stationary_stats(const ThermoParams& tp, std::size_t n_paths,
                                               double burn_in, std::uint64_t seed,
                                               double dt, const SimulationOptions& opt = {}) {
  if (n_paths == 0) throw DomainError("empty ensemble");
  if (burn_in < 10.0 / tp.gamma() * (1.0 - 1e-12)) {
    throw DomainError("burn-in must be at least 10/gamma");
  }
  const auto xs = ensemble_terminal_values(tp, 0.0, burn_in, dt, n_paths, seed, opt);
  const double w = 6.0 * std::sqrt(tp.stationary_variance());
  return summarize(xs, -w, w, kDefaultBins);
}

// Largest gap between the empirical CDF of `sorted` and `cdf`.
template <class Cdf>
double ks_statistic(std::span<const double> sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

// Asymptotic Kolmogorov tail probability with Stephens' finite-n correction.
inline double kolmogorov_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct TransitionReport {
  double x1 = 0.0;
  double lag = 0.0;
  double expected_mean = 0.0;
  double expected_variance = 0.0;
  EnsembleStats stats;
  double ks_statistic = 0.0;
  double p_value = 0.0;
  double alpha = 0.01;

  bool ks_passed() const { return p_value >= alpha; }
  double mean_z() const { return std::abs(stats.mean - expected_mean) / stats.mean_se; }
};

// Simulates n_paths trajectories from x1 over `lag` and compares the terminal
// distribution with the exact two-gate density.
inline TransitionReport empirical_transition_check(const ThermoParams& tp, double x1,
                                                   double lag, std::size_t n_paths,
                                                   std::uint64_t seed, double dt,
                                                   const SimulationOptions& opt = {},
                                                   double alpha = 0.01) {
  if (n_paths == 0) throw DomainError("empty ensemble");
  if (!(lag > 0.0)) throw DomainError("lag must be > 0");
  const double a = tp.gamma() * lag;

  auto xs = ensemble_terminal_values(tp, x1, lag, dt, n_paths, seed, opt);
  TransitionReport rep;
  rep.x1 = x1;
  rep.lag = lag;
  rep.alpha = alpha;
  rep.expected_mean = transition_mean(x1, a);
  rep.expected_variance = transition_variance(tp, a);
  const double w = 6.0 * std::sqrt(rep.expected_variance);
  rep.stats = summarize(xs, rep.expected_mean - w, rep.expected_mean + w, kDefaultBins);

  std::sort(xs.begin(), xs.end());
  rep.ks_statistic =
      ks_statistic(xs, [&](double x) { return transition_cdf(tp, x, x1, a); });
  rep.p_value = kolmogorov_pvalue(rep.ks_statistic, xs.size());
  return rep;
}

inline void write_path_csv(std::ostream& os, const Path& p) {
  os << "tau,x\n";
  os.precision(17);
  for (std::size_t i = 0; i < p.size(); ++i) os << p.times()[i] << ',' << p.values()[i] << '\n';
}

inline void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_left,bin_right,count\n";
  os.precision(17);
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    os << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.counts[b] << '\n';
  }
}

}  // namespace omqm
