#pragma once

// Tunable near-Pareto-optimal designs, one per function class, each
// parameterized by a target rate rho:
//
//   RHB  (Q_{m,L}):  alpha = (1-rho)^2/m, beta = rho^2, eta = 0
//   GD   (S_{m,L}):  alpha = (1-rho)/m
//   RGD  (S_{m,L}):  one extra stepsize degree of freedom over GD, same rate
//   RAM  (F_{m,L}):  accelerated, reduces to TM at the smallest admissible rho
//
// Tuned as aggressively as possible each design recovers the classical
// method for its class; detuning trades rate for noise suppression.

#include <cmath>
#include <functional>
#include <string>

#include "fomcert/core.hpp"
#include "fomcert/quadratic.hpp"
#include "fomcert/sector.hpp"

namespace fomcert {

namespace detail {

inline void require_range(const char* who, double rho, double lo, double hi_open) {
  if (!(rho >= lo && rho < hi_open)) {
    throw std::domain_error(std::string(who) + ": rate " + std::to_string(rho) +
                            " outside [" + std::to_string(lo) + ", " +
                            std::to_string(hi_open) + ")");
  }
}

inline void require_gap(const char* who, double m, double L) {
  FunctionClass{FunctionClassKind::Quadratic, m, L}.validate();
  if (m == L) throw std::domain_error(std::string(who) + ": requires m < L");
}

}  // namespace detail

inline double rhb_min_rate(double m, double L) {
  return (std::sqrt(L) - std::sqrt(m)) / (std::sqrt(L) + std::sqrt(m));
}
inline double gd_min_rate(double m, double L) { return (L - m) / (L + m); }
inline double ram_min_rate(double m, double L) { return 1.0 - std::sqrt(m / L); }

struct RhbDesign {
  AlgorithmParams params;
  double rho = 0.0;  // exact rate over Q_{m,L}
  double m = 1.0;
  // exact sensitivity over Q_{m,L}
  double gamma(const NoiseModel& noise) const {
    noise.validate();
    const double r2 = rho * rho;
    const double onep = 1.0 + rho;
    return std::sqrt(noise.sigma2 * noise.d) / m *
           std::sqrt((1.0 - r2 * r2) / (onep * onep * onep * onep));
  }
};

inline RhbDesign rhb(double rho, double m, double L) {
  FunctionClass{FunctionClassKind::Quadratic, m, L}.validate();
  detail::require_range("rhb", rho, rhb_min_rate(m, L), 1.0);
  RhbDesign d;
  d.params = {(1.0 - rho) * (1.0 - rho) / m, rho * rho, 0.0};
  d.rho = rho;
  d.m = m;
  return d;
}

struct GdDesign {
  AlgorithmParams params;
  double rho = 0.0;  // exact rate over S_{m,L}
  double m = 1.0;
  double gamma(const NoiseModel& noise) const {
    noise.validate();
    return std::sqrt(noise.sigma2 * noise.d) / m *
           std::sqrt((1.0 - rho) / (1.0 + rho));
  }
};

inline GdDesign gd_rho(double rho, double m, double L) {
  FunctionClass{FunctionClassKind::Quadratic, m, L}.validate();
  detail::require_range("gd_rho", rho, gd_min_rate(m, L), 1.0);
  return {{(1.0 - rho) / m, 0.0, 0.0}, rho, m};
}

inline Interval rgd_alpha_range(double rho, double m) {
  return {(1.0 - rho) * (1.0 - rho) / m, (1.0 - rho * rho) / m};
}

// Robust Gradient Descent: certified rate rho over S_{m,L} for every alpha
// in the admissible interval. At the smallest alpha this is GD in disguise
// (beta = rho, eta = rho/(1-rho)); the rational beta expression is avoided
// there since it is 0/0-prone.
inline AlgorithmParams rgd(double rho, double m, double L, double alpha) {
  detail::require_gap("rgd", m, L);
  detail::require_range("rgd", rho, gd_min_rate(m, L), 1.0);
  const Interval ar = rgd_alpha_range(rho, m);
  const double tol = 1e-12 * (1.0 + std::abs(ar.hi));
  if (!(alpha >= ar.lo - tol && alpha <= ar.hi + tol)) {
    throw std::domain_error("rgd: alpha " + std::to_string(alpha) + " outside [" +
                            std::to_string(ar.lo) + ", " + std::to_string(ar.hi) + "]");
  }
  const double om = 1.0 - rho;
  if (alpha <= ar.lo + tol) {
    return {alpha, rho, rho / om};
  }
  const double ma = m * alpha;
  const double num =
      rho * (2.0 * m * ma * alpha * L -
             ma * om * (L * (3.0 - rho) + m * (1.0 - 3.0 * rho)) +
             (L + m) * om * om * om * om);
  const double den = (L - m) * om * (om * om * om - ma * (1.0 + rho));
  const double beta = num / den;
  const double eta = (beta - rho) / ma + rho / om;
  return {alpha, beta, eta};
}

struct RgdOptimum {
  AlgorithmParams params;
  double alpha = 0.0;
  double gamma = 0.0;
  int evaluations = 0;
};

// Minimizes the certified sensitivity over the admissible alpha interval by
// golden-section search. The analytic optimality condition has degree in the
// hundreds, so a line search is the practical route. Repeated solver
// failures fall back to the GD endpoint.
inline RgdOptimum rgd_optimize(double rho, double m, double L, const NoiseModel& noise,
                               double line_search_tol = 1e-6,
                               const lmi::SolveOptions& solver = {}) {
  detail::require_gap("rgd_optimize", m, L);
  detail::require_range("rgd_optimize", rho, gd_min_rate(m, L), 1.0);
  noise.validate();
  const Interval ar = rgd_alpha_range(rho, m);
  int evals = 0;
  int failures = 0;
  const auto objective = [&](double alpha) -> double {
    ++evals;
    try {
      return sector_gamma(to_state_space(rgd(rho, m, L, alpha)), m, L, noise, solver)
          .gamma;
    } catch (const std::exception&) {
      if (++failures > 5) throw;
      return std::numeric_limits<double>::infinity();
    }
  };

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = ar.lo, b = ar.hi;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 40 && (b - a) > line_search_tol * (1.0 + ar.hi); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = objective(x2);
    }
  }
  double best_alpha = f1 <= f2 ? x1 : x2;
  double best_gamma = std::min(f1, f2);
  if (!std::isfinite(best_gamma)) {
    best_alpha = ar.lo;
    best_gamma = gd_rho(rho, m, L).gamma(noise);
  }
  RgdOptimum out;
  out.alpha = best_alpha;
  out.params = rgd(rho, m, L, best_alpha);
  out.gamma = best_gamma;
  out.evaluations = evals;
  return out;
}

// Explicit Lyapunov matrix (with multiplier lambda = 1) certifying the RGD
// rate LMI for alpha strictly inside the admissible interval. A positive
// rescaling makes it satisfy the P >= I normalization.
inline Matrix rgd_certificate_P(double rho, double m, double L, double alpha) {
  detail::require_gap("rgd_certificate_P", m, L);
  if (!(rho > gd_min_rate(m, L) && rho < 1.0)) {
    throw std::domain_error("rgd_certificate_P: rate outside ((L-m)/(L+m), 1)");
  }
  const Interval ar = rgd_alpha_range(rho, m);
  if (!(alpha > ar.lo && alpha < ar.hi)) {
    throw std::domain_error("rgd_certificate_P: alpha outside the open interval");
  }
  const double r = rho, a = alpha;
  const double rm1 = r - 1.0;
  const double rm1_2 = rm1 * rm1, rm1_3 = rm1_2 * rm1, rm1_4 = rm1_2 * rm1_2;
  const double core = a * m * (r + 1.0) + rm1_3;
  const double den = a * a * rm1 * core;
  const double p11 = (-a * L * rm1 * (a * m + r * r - 1.0) -
                      a * a * m * m * (r + 1.0) + a * m * (r + 1.0) * rm1_2 +
                      2.0 * r * rm1_4) /
                     (den * r);
  const double p12 = (a * L * rm1 * (3.0 * a * m - r * r + 4.0 * r - 3.0) +
                      a * a * m * m * (r + 1.0) - a * m * (3.0 * r - 1.0) * rm1_2 -
                      2.0 * rm1_4) /
                     den;
  const double p22 =
      (a * L *
           (-2.0 * a * a * m * m - a * m * (r * r + 3.0 * r - 4.0) +
            rm1_2 * (r * r - r - 2.0)) +
       a * a * m * m * (r * r - 5.0 * r + 2.0) +
       a * m * (r * r + 5.0 * r - 4.0) * rm1_2 + 2.0 * rm1_4) /
      den;
  return Matrix{{p11, p12}, {p12, p22}};
}

// Robust Accelerated Method for F_{m,L}.
inline AlgorithmParams ram(double rho, double m, double L) {
  detail::require_gap("ram", m, L);
  detail::require_range("ram", rho, ram_min_rate(m, L), 1.0);
  const double om = 1.0 - rho;
  const double alpha = (1.0 + rho) * om * om / m;
  const double beta = rho * (L * (1.0 - rho + 2.0 * rho * rho) - m * (1.0 + rho)) /
                      ((L - m) * (3.0 - rho));
  const double eta = rho * (L * (1.0 - rho * rho) - m * (1.0 + 2.0 * rho - rho * rho)) /
                     ((L - m) * (3.0 - rho) * (1.0 - rho * rho));
  return {alpha, beta, eta};
}

// Explicit Q ≻ 0 whose induced off-by-one IQC certificate proves the RAM
// rate. Singular exactly at the minimum rate (m = L(1-rho)^2), where the
// certificate degenerates.
inline Matrix ram_certificate_Q(double rho, double m, double L) {
  detail::require_gap("ram_certificate_Q", m, L);
  detail::require_range("ram_certificate_Q", rho, ram_min_rate(m, L), 1.0);
  const double om = 1.0 - rho, op = 1.0 + rho;
  if (std::abs(m - L * om * om) <= 1e-12 * m) {
    throw std::domain_error(
        "ram_certificate_Q: certificate singular at m = L(1-rho)^2");
  }
  const double den = (3.0 - rho) * om * om * op * op * op * (m - L * om * om);
  const double r = rho, r2 = rho * rho, r3 = r2 * rho, r4 = r3 * rho;
  const double omsq2 = (1.0 - r2) * (1.0 - r2);
  Matrix q(3, 3);
  q(0, 0) = r * (2.0 * m * m * om + 2.0 * L * m * (4.0 + r - 2.0 * r2 + r3) -
                 L * L * omsq2);
  q(0, 1) = r * (-2.0 * m * m * om - 2.0 * L * m * op * op +
                 L * L * (4.0 - r) * omsq2);
  q(0, 2) = (3.0 - r) * (1.0 - r2) *
            (-m * (1.0 + r2) + L * (1.0 + r - 2.0 * r2 - r3 + r4));
  q(1, 1) = r * (2.0 * m * m * om - 2.0 * L * m * (2.0 - 3.0 * r - 4.0 * r2 + r3) +
                 L * L * (2.0 - 4.0 * r + r2) * omsq2);
  q(1, 2) = r * (3.0 - r) * (1.0 - r2) *
            (m * (-1.0 + 2.0 * r + r2) - L * (-1.0 + r - r3 + r4));
  q(2, 2) = r * (3.0 - r) * (3.0 - r) * omsq2;
  q(1, 0) = q(0, 1);
  q(2, 0) = q(0, 2);
  q(2, 1) = q(1, 2);
  return (m / den) * q;
}

}  // namespace fomcert
