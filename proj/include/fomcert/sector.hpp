#pragma once

// Certified rate and sensitivity bounds over S_{m,L}, the one-point strongly
// convex (sector-bounded) functions. Both bounds come from small LMIs over a
// common quadratic Lyapunov function:
//
//   rate:  [A B; I 0]^T [P 0; 0 -rho^2 P] [A B; I 0]
//            + lambda [C 0; 0 1]^T S [C 0; 0 1] ⪯ 0,   P ⪰ I, lambda >= 0
//   gamma: [A B; I 0]^T [P 0; 0 -P] [A B; I 0]
//            + lambda [C 0; 0 1]^T S [C 0; 0 1] + [C^T C 0; 0 0] ⪯ 0,
//          P ⪰ 0, lambda >= 0, minimizing B^T P B
//
// with the sector form S = [-2mL, m+L; m+L, -2].

#include <cmath>
#include <optional>

#include "fomcert/core.hpp"
#include "fomcert/lmi.hpp"

namespace fomcert {

inline Matrix sector_form(double m, double L) {
  return Matrix{{-2.0 * m * L, m + L}, {m + L, -2.0}};
}

namespace detail {

// [A B; I 0] for state dimension n: maps (xi, u) to (xi^+, xi).
inline Matrix step_map(const StateSpace& s) {
  const int n = s.n();
  Matrix g = Matrix::Zero(2 * n, n + 1);
  g.topLeftCorner(n, n) = s.A;
  g.topRightCorner(n, 1) = s.B;
  g.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return g;
}

// [C 0; 0 1]: maps (xi, u) to (y, u).
inline Matrix output_map(const StateSpace& s) {
  const int n = s.n();
  Matrix g = Matrix::Zero(2, n + 1);
  g.block(0, 0, 1, n) = s.C;
  g(1, n) = 1.0;
  return g;
}

inline Matrix lyap_sandwich(const StateSpace& s, const Matrix& p, double decay2) {
  const int n = s.n();
  Matrix mid = Matrix::Zero(2 * n, 2 * n);
  mid.topLeftCorner(n, n) = p;
  mid.bottomRightCorner(n, n) = -decay2 * p;
  const Matrix g = step_map(s);
  return g.transpose() * mid * g;
}

}  // namespace detail

struct SectorFeasibility {
  bool feasible = false;
  Certificate certificate;
  lmi::SdpSolution solution;
};

inline lmi::LmiProblem sector_rate_problem(const StateSpace& s, double m, double L,
                                           double rho) {
  s.validate();
  const int n = s.n();
  lmi::LmiProblem p;
  p.add_symmetric("P", n, lmi::Sign::Free);
  p.add_scalar("lambda", lmi::Sign::NonNeg);
  const Matrix sec = sector_form(m, L);
  const Matrix cmat = detail::output_map(s);
  p.add_lmi("rate", [=](const lmi::Assignment& a) -> Matrix {
    return detail::lyap_sandwich(s, a[0], rho * rho) +
           a[1](0, 0) * cmat.transpose() * sec * cmat;
  });
  p.add_lmi("P >= I", [n](const lmi::Assignment& a) -> Matrix {
    return Matrix::Identity(n, n) - a[0];
  });
  return p;
}

inline lmi::LmiProblem sector_gamma_problem(const StateSpace& s, double m, double L) {
  s.validate();
  const int n = s.n();
  lmi::LmiProblem p;
  p.add_symmetric("P", n, lmi::Sign::Psd);
  p.add_scalar("lambda", lmi::Sign::NonNeg);
  const Matrix sec = sector_form(m, L);
  const Matrix cmat = detail::output_map(s);
  Matrix ctc = Matrix::Zero(n + 1, n + 1);
  ctc.topLeftCorner(n, n) = s.C.transpose() * s.C;
  p.add_lmi("gamma", [=](const lmi::Assignment& a) -> Matrix {
    return detail::lyap_sandwich(s, a[0], 1.0) +
           a[1](0, 0) * cmat.transpose() * sec * cmat + ctc;
  });
  const Matrix b = s.B;
  p.set_objective([b](const lmi::Assignment& a) {
    return (b.transpose() * a[0] * b)(0, 0);
  });
  return p;
}

inline SectorFeasibility sector_rate_feasible(const StateSpace& s, double m, double L,
                                              double rho,
                                              const lmi::SolveOptions& opts = {}) {
  FunctionClass{FunctionClassKind::OnePointStronglyConvex, m, L}.validate();
  if (!(rho > 0.0)) throw std::domain_error("sector_rate_feasible: need rho > 0");
  lmi::LmiProblem p = sector_rate_problem(s, m, L, rho);
  lmi::SdpSolution sol = lmi::solve(p, opts);
  if (sol.status == lmi::SolveStatus::NumericalFailure) {
    throw numerical_error("sector_rate_feasible: " + sol.message);
  }
  SectorFeasibility f;
  f.feasible = sol.ok();
  if (f.feasible) {
    f.certificate.kind = "sector-rate";
    f.certificate.parts["P"] = sol.values[0];
    f.certificate.parts["lambda"] = sol.values[1];
    f.certificate.residual = sol.max_violation;
  }
  f.solution = std::move(sol);
  return f;
}

// Smallest certified rate via bisection on [0, 1 + margin]. Rates above 1
// are reported as values (sweeps filter on rho < 1); if even the upper
// bracket is uncertifiable the sentinel +inf is returned. Knife-edge rates
// the solver cannot decide count as uncertified, which can shift the answer
// by at most the width of the undecided band (well under the tolerance).
inline PerfPoint sector_rate(const StateSpace& s, double m, double L,
                             double tol = 1e-6, const lmi::SolveOptions& opts = {}) {
  FunctionClass{FunctionClassKind::OnePointStronglyConvex, m, L}.validate();
  PerfPoint out;
  out.exact = false;
  Certificate best;
  const auto pred = [&](double rho) {
    lmi::LmiProblem prob = sector_rate_problem(s, m, L, rho);
    lmi::SdpSolution sol = lmi::solve(prob, opts);
    if (sol.ok()) {
      best.kind = "sector-rate";
      best.parts["P"] = sol.values[0];
      best.parts["lambda"] = sol.values[1];
      best.residual = sol.max_violation;
    }
    return sol.ok();
  };
  const auto rho = lmi::bisect_rho(pred, 1e-9, 1.5, tol);
  if (!rho) {
    out.rho = std::numeric_limits<double>::infinity();
    return out;
  }
  out.rho = *rho;
  out.certificate = std::move(best);
  return out;
}

inline PerfPoint sector_gamma(const StateSpace& s, double m, double L,
                              const NoiseModel& noise,
                              const lmi::SolveOptions& opts = {}) {
  FunctionClass{FunctionClassKind::OnePointStronglyConvex, m, L}.validate();
  noise.validate();
  lmi::LmiProblem p = sector_gamma_problem(s, m, L);
  lmi::SdpSolution sol = lmi::solve(p, opts);
  if (sol.status == lmi::SolveStatus::Infeasible) {
    throw no_certificate_error("sector_gamma: LMI infeasible (rate likely >= 1)");
  }
  if (sol.status != lmi::SolveStatus::Optimal) {
    throw numerical_error("sector_gamma: " + sol.message);
  }
  PerfPoint out;
  out.exact = false;
  out.gamma = std::sqrt(std::max(0.0, noise.sigma2 * noise.d * sol.objective));
  out.certificate.kind = "sector-gamma";
  out.certificate.parts["P"] = sol.values[0];
  out.certificate.parts["lambda"] = sol.values[1];
  out.certificate.residual = sol.max_violation;
  return out;
}

// Verifies an explicit (P, lambda) pair against the rate LMI. The LMI is
// homogeneous in (P, lambda), so a solution with P ≻ 0 but P not ⪰ I is
// rescaled by 1/lambda_min(P) first.
inline lmi::CheckReport sector_check_rate(const StateSpace& s, double m, double L,
                                          double rho, Matrix p, double lambda,
                                          double tol = 1e-7) {
  const double pmin = min_eigenvalue(p);
  if (pmin > 0.0 && pmin < 1.0) {
    p /= pmin;
    lambda /= pmin;
  }
  lmi::LmiProblem prob = sector_rate_problem(s, m, L, rho);
  lmi::Assignment a{p, Matrix::Constant(1, 1, lambda)};
  return lmi::check_assignment(prob, a, tol);
}

inline lmi::CheckReport sector_check_gamma(const StateSpace& s, double m, double L,
                                           const Matrix& p, double lambda,
                                           double tol = 1e-7) {
  lmi::LmiProblem prob = sector_gamma_problem(s, m, L);
  lmi::Assignment a{p, Matrix::Constant(1, 1, lambda)};
  return lmi::check_assignment(prob, a, tol);
}

}  // namespace fomcert
