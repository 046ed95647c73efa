#pragma once

// Exact convergence rate and noise sensitivity over the class Q_{m,L} of
// strongly convex quadratics. For the three-parameter family both metrics
// have closed forms; the general state-space path evaluates the spectral
// radius of A + qBC and a discrete Lyapunov solve per curvature sample.
// For n <= 2 both quantities are quasiconvex/convex in q, so only the
// endpoints q in {m, L} need to be checked.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fomcert/core.hpp"
#include "fomcert/linalg.hpp"

namespace fomcert {

struct QuadEndpointReport {
  double rho_at_m = 0.0, rho_at_L = 0.0;
  double gamma_at_m = 0.0, gamma_at_L = 0.0;
  double delta_m = 0.0, delta_L = 0.0;  // discriminant at each endpoint
  double rho = 0.0;
  double gamma = 0.0;
};

namespace detail {

// Spectral radius of the closed loop at curvature q, from the characteristic
// polynomial z^2 + (alpha(1+eta)q - beta - 1) z + (beta - alpha*eta*q).
inline double quad_rho_at(const AlgorithmParams& p, double q, double* delta_out) {
  const double a = p.beta + 1.0 - p.alpha * q - p.alpha * p.eta * q;
  const double b = p.beta - p.alpha * p.eta * q;
  const double delta = a * a - 4.0 * b;
  if (delta_out) *delta_out = delta;
  if (delta < 0.0) return std::sqrt(b);
  return 0.5 * (std::abs(a) + std::sqrt(delta));
}

// Value under the square root of the sensitivity formula at curvature q
// (before the sigma^2 d factor).
inline double quad_psi_at(const AlgorithmParams& p, double q) {
  const double ae = p.alpha * p.eta;
  const double num = p.alpha * (1.0 + p.beta + (1.0 + 2.0 * p.eta) * ae * q);
  const double den = q * (1.0 - p.beta + ae * q) *
                     (2.0 + 2.0 * p.beta - (1.0 + 2.0 * p.eta) * p.alpha * q);
  return num / den;
}

}  // namespace detail

inline QuadEndpointReport quad_report(const AlgorithmParams& p, double m, double L,
                                      const NoiseModel& noise = {}) {
  FunctionClass{FunctionClassKind::Quadratic, m, L}.validate();
  noise.validate();
  QuadEndpointReport r;
  r.rho_at_m = detail::quad_rho_at(p, m, &r.delta_m);
  r.rho_at_L = detail::quad_rho_at(p, L, &r.delta_L);
  r.rho = std::max(r.rho_at_m, r.rho_at_L);
  if (r.rho < 1.0) {
    const double scale = noise.sigma2 * noise.d;
    r.gamma_at_m = std::sqrt(scale * detail::quad_psi_at(p, m));
    r.gamma_at_L = std::sqrt(scale * detail::quad_psi_at(p, L));
    r.gamma = std::max(r.gamma_at_m, r.gamma_at_L);
  } else {
    r.gamma_at_m = r.gamma_at_L = r.gamma = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

// Worst-case rate over Q_{m,L}. A value >= 1 reports divergence; it is not
// an error.
inline double quad_rate(const AlgorithmParams& p, double m, double L) {
  FunctionClass{FunctionClassKind::Quadratic, m, L}.validate();
  return std::max(detail::quad_rho_at(p, m, nullptr),
                  detail::quad_rho_at(p, L, nullptr));
}

inline double quad_sensitivity(const AlgorithmParams& p, double m, double L,
                               const NoiseModel& noise) {
  const double rho = quad_rate(p, m, L);
  if (!(rho < 1.0)) {
    throw instability_error("quad_sensitivity: rate " + std::to_string(rho) +
                            " >= 1, sensitivity undefined");
  }
  noise.validate();
  const double scale = noise.sigma2 * noise.d;
  return std::sqrt(scale * std::max(detail::quad_psi_at(p, m),
                                    detail::quad_psi_at(p, L)));
}

// The four Jury stability conditions at curvature q (roots of the closed-loop
// characteristic polynomial strictly inside the unit disk).
inline bool jury_stable(const AlgorithmParams& p, double q) {
  const double ae = p.alpha * p.eta;
  return p.alpha * q > 0.0 &&
         2.0 * p.beta + 2.0 - p.alpha * (2.0 * p.eta + 1.0) * q > 0.0 &&
         1.0 + p.beta - ae * q > 0.0 && 1.0 - p.beta + ae * q > 0.0;
}

namespace detail {

inline std::vector<double> q_samples(double m, double L, int n_state, int grid_size) {
  std::vector<double> qs{m, L};
  if (n_state > 2 && L > m) {
    for (int i = 1; i + 1 < grid_size; ++i) {
      qs.push_back(m + (L - m) * static_cast<double>(i) / (grid_size - 1));
    }
  }
  return qs;
}

}  // namespace detail

// sup over q in [m, L] of the closed-loop spectral radius. Exact via
// endpoints for n <= 2; for n > 2 a uniform grid gives a lower estimate of
// the supremum (the radius need not be quasiconvex in q then).
inline double quad_rate_general(const StateSpace& s, double m, double L,
                                int q_grid_size = 129) {
  s.validate();
  FunctionClass{FunctionClassKind::Quadratic, m, L}.validate();
  double r = 0.0;
  for (double q : detail::q_samples(m, L, s.n(), q_grid_size)) {
    r = std::max(r, spectral_radius(s.A + q * s.B * s.C));
  }
  return r;
}

inline double quad_sensitivity_general(const StateSpace& s, double m, double L,
                                       const NoiseModel& noise,
                                       int q_grid_size = 129) {
  const double rho = quad_rate_general(s, m, L, q_grid_size);
  if (!(rho < 1.0)) {
    throw instability_error("quad_sensitivity_general: rate " +
                            std::to_string(rho) + " >= 1");
  }
  noise.validate();
  double worst = 0.0;
  for (double q : detail::q_samples(m, L, s.n(), q_grid_size)) {
    const Matrix f = s.A + q * s.B * s.C;
    const Matrix pq = solve_discrete_lyapunov(f, s.C.transpose() * s.C);
    worst = std::max(worst, (s.B.transpose() * pq * s.B)(0, 0));
  }
  return std::sqrt(noise.sigma2 * noise.d * worst);
}

}  // namespace fomcert
