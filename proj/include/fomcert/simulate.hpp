#pragma once

// Stochastic trajectory simulation of algorithms on quadratics with additive
// Gaussian gradient noise, used to validate the certified rate and
// sensitivity empirically. Noise is drawn from counter-based streams keyed by
// (seed, trial, step), so trials are reproducible and order-independent under
// parallel execution.

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "fomcert/core.hpp"
#include "fomcert/linalg.hpp"
#include "fomcert/sweep.hpp"

namespace fomcert {

struct QuadraticProblem {
  Matrix hessian;  // d x d symmetric, eigenvalues within [m, L]
  Vector linear;
  Vector ystar;    // derived: hessian * ystar + linear = 0
  double fstar = 0.0;
  double m = 0.0, L = 0.0;

  int dim() const { return static_cast<int>(hessian.rows()); }

  Vector gradient(const Vector& y) const { return hessian * y + linear; }

  double value(const Vector& y) const {
    return 0.5 * y.dot(hessian * y) + linear.dot(y);
  }
};

inline QuadraticProblem make_quadratic(Matrix hessian, Vector linear, double m,
                                       double L) {
  QuadraticProblem q;
  q.hessian = require_symmetric(hessian);
  if (linear.size() != q.hessian.rows()) {
    throw shape_error("make_quadratic: linear term size mismatch");
  }
  const auto eig = sym_eig(q.hessian);
  if (eig.values.minCoeff() < m - 1e-9 || eig.values.maxCoeff() > L + 1e-9) {
    throw std::domain_error("make_quadratic: Hessian spectrum outside [m, L]");
  }
  q.linear = std::move(linear);
  q.ystar = q.hessian.ldlt().solve(-q.linear);
  q.fstar = q.value(q.ystar);
  q.m = m;
  q.L = L;
  return q;
}

// Worst-case quadratic: H = ((L-m)/4) tridiag(-1, 2, -1) + m I with a linear
// term -((L-m)/4) e_1. The tridiagonal part has spectrum strictly inside
// (0, 4), so the Hessian eigenvalues lie strictly inside (m, L) for d >= 2.
inline QuadraticProblem nesterov_tridiagonal(int d, double m, double L) {
  FunctionClass{FunctionClassKind::Quadratic, m, L}.validate();
  if (d < 2) throw std::domain_error("nesterov_tridiagonal: need d >= 2");
  const double c = (L - m) / 4.0;
  Matrix h = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    h(i, i) = 2.0 * c + m;
    if (i + 1 < d) h(i, i + 1) = h(i + 1, i) = -c;
  }
  Vector lin = Vector::Zero(d);
  lin[0] = -c;
  return make_quadratic(std::move(h), std::move(lin), m, L);
}

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stateless uniform draw at a (key, counter) coordinate, in (0, 1).
inline double counter_uniform(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t h = mix64(key ^ mix64(counter + 0x632be59bd9b4e019ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// Fills a row of independent standard Gaussians via Box-Muller.
inline void counter_gaussians(std::uint64_t key, std::uint64_t step, double* out,
                              int count) {
  const std::uint64_t base = step * static_cast<std::uint64_t>(count + (count & 1));
  for (int k = 0; k < count; k += 2) {
    const double u1 = counter_uniform(key, base + k);
    const double u2 = counter_uniform(key, base + k + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    out[k] = r * std::cos(2.0 * M_PI * u2);
    if (k + 1 < count) out[k + 1] = r * std::sin(2.0 * M_PI * u2);
  }
}

}  // namespace detail

struct SimConfig {
  long T = 1000;
  int trials = 1;
  std::uint64_t seed = 0;
  Vector init;      // starting point x^0 = x^{-1} (defaults to the origin)
  int workers = 1;  // trials are batched; merging stays in trial order
};

struct TrajectoryStats {
  std::vector<double> mean_err;     // mean over trials of ||y^t - y*||
  std::vector<double> std_err;      // +-1 standard deviation across trials
  std::vector<double> mean_sq_err;  // mean over trials of ||y^t - y*||^2
  long T = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  bool diverged = false;
};

// Runs independent noisy trajectories of xi+ = A xi + B(u + w) on a quadratic
// and records per-step error statistics. Iterates are stored row-wise
// (state n x d); both memory slots start at the configured initial point.
inline TrajectoryStats simulate(const StateSpace& s, const QuadraticProblem& prob,
                                const NoiseModel& noise, const SimConfig& cfg) {
  s.validate();
  noise.validate();
  if (cfg.T < 1 || cfg.trials < 1) {
    throw std::domain_error("simulate: need T >= 1 and trials >= 1");
  }
  const int d = prob.dim();
  if (noise.d != d) {
    throw shape_error("simulate: noise dimension does not match the problem");
  }
  Vector init = cfg.init;
  if (init.size() == 0) init = Vector::Zero(d);
  if (init.size() != d) throw shape_error("simulate: init dimension mismatch");

  const int n = s.n();
  const double sigma = std::sqrt(noise.sigma2);
  TrajectoryStats stats;
  stats.T = cfg.T;
  stats.trials = cfg.trials;
  stats.seed = cfg.seed;
  std::vector<double> sum_e(cfg.T, 0.0), sum_e2(cfg.T, 0.0);
  bool diverged = false;

  const auto run_trial = [&](int trial, std::vector<double>& err) {
    const std::uint64_t key =
        detail::mix64(cfg.seed ^ detail::mix64(static_cast<std::uint64_t>(trial)));
    Matrix xi(n, d);
    for (int i = 0; i < n; ++i) xi.row(i) = init.transpose();
    Vector w(d);
    bool dead = false;
    double last = 0.0;
    for (long t = 0; t < cfg.T; ++t) {
      if (dead) {
        err[t] = last;
        continue;
      }
      const Vector y = (s.C * xi).transpose();
      const double e = (y - prob.ystar).norm();
      err[t] = last = e;
      if (!std::isfinite(e) || e > 1e150) {
        dead = true;
        diverged = true;
        continue;
      }
      Vector u = prob.gradient(y);
      if (sigma > 0.0) {
        detail::counter_gaussians(key, static_cast<std::uint64_t>(t), w.data(), d);
        u += sigma * w;
      }
      xi = s.A * xi + s.B * u.transpose();
    }
  };

  const int workers = std::max(1, cfg.workers);
  std::vector<std::vector<double>> batch(
      static_cast<std::size_t>(std::min(workers, cfg.trials)),
      std::vector<double>(cfg.T));
  for (int t0 = 0; t0 < cfg.trials; t0 += workers) {
    const int batch_n = std::min(workers, cfg.trials - t0);
    if (batch_n == 1) {
      run_trial(t0, batch[0]);
    } else {
      std::vector<std::thread> pool;
      for (int k = 0; k < batch_n; ++k) {
        pool.emplace_back(run_trial, t0 + k, std::ref(batch[k]));
      }
      for (auto& th : pool) th.join();
    }
    // merge strictly in trial order so reductions are reproducible
    for (int k = 0; k < batch_n; ++k) {
      for (long t = 0; t < cfg.T; ++t) {
        sum_e[t] += batch[k][t];
        sum_e2[t] += batch[k][t] * batch[k][t];
      }
    }
  }

  stats.diverged = diverged;
  stats.mean_err.resize(cfg.T);
  stats.std_err.resize(cfg.T);
  stats.mean_sq_err.resize(cfg.T);
  for (long t = 0; t < cfg.T; ++t) {
    const double mean = sum_e[t] / cfg.trials;
    stats.mean_err[t] = mean;
    stats.mean_sq_err[t] = sum_e2[t] / cfg.trials;
    stats.std_err[t] =
        cfg.trials > 1
            ? std::sqrt(std::max(0.0, (sum_e2[t] - cfg.trials * mean * mean) /
                                          (cfg.trials - 1)))
            : 0.0;
  }
  return stats;
}

struct SteadyState {
  double rms = 0.0;
  bool stationary = true;  // first and last window halves agree within 10%
};

// Root-mean-square error over the trailing window, averaged across trials.
inline SteadyState steady_state_rms(const TrajectoryStats& stats,
                                    double window_fraction = 0.5) {
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw std::domain_error("steady_state_rms: window fraction in (0, 1]");
  }
  const long T = stats.T;
  const long start = T - std::max<long>(1, static_cast<long>(window_fraction * T));
  double acc = 0.0;
  for (long t = start; t < T; ++t) acc += stats.mean_sq_err[t];
  SteadyState out;
  out.rms = std::sqrt(acc / static_cast<double>(T - start));
  const long half = (T - start) / 2;
  if (half > 0) {
    double first = 0.0, last = 0.0;
    for (long t = start; t < start + half; ++t) first += stats.mean_err[t];
    for (long t = T - half; t < T; ++t) last += stats.mean_err[t];
    first /= half;
    last /= half;
    const double ref = std::max(std::abs(first), std::abs(last));
    out.stationary = ref == 0.0 || std::abs(first - last) <= 0.1 * ref;
  }
  return out;
}

// Geometric-mean per-step decay of the mean error over [t0, t1].
inline double decay_slope(const TrajectoryStats& stats, long t0, long t1) {
  if (t0 < 0 || t1 <= t0 || t1 >= stats.T) {
    throw std::domain_error("decay_slope: bad window");
  }
  return std::log(stats.mean_err[t1] / stats.mean_err[t0]) /
         static_cast<double>(t1 - t0);
}

// Least-squares slope of log(mean_err) over the window [t0, t1].
inline double fit_log_decay(const TrajectoryStats& stats, long t0, long t1) {
  if (t0 < 0 || t1 <= t0 || t1 >= stats.T) {
    throw std::domain_error("fit_log_decay: bad window");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (long t = t0; t <= t1; ++t) {
    if (!(stats.mean_err[t] > 0.0)) continue;
    const double x = static_cast<double>(t), y = std::log(stats.mean_err[t]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fomcert
