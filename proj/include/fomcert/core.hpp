#pragma once

// Domain types for first-order methods with two states of memory, the
// function classes they are analyzed against, and the standard tunings.
//
// The method family is
//   x^{t+1} = x^t - alpha * g(x^t + eta*(x^t - x^{t-1})) + beta*(x^t - x^{t-1})
// realized in state-space form with state xi^t = (x^t, x^{t-1}).

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "fomcert/errors.hpp"
#include "fomcert/linalg.hpp"

namespace fomcert {

enum class FunctionClassKind {
  Quadratic,                // Q_{m,L}: strongly convex quadratics
  OnePointStronglyConvex,   // S_{m,L}: one-point (sector) condition
  SmoothStronglyConvex,     // F_{m,L}: smooth strongly convex
};

// Curvature bounds 0 < m <= L. The classes nest: Q ⊆ F ⊆ S.
struct FunctionClass {
  FunctionClassKind kind = FunctionClassKind::Quadratic;
  double m = 1.0;
  double L = 1.0;

  void validate() const {
    if (!(m > 0.0) || !(m <= L) || !std::isfinite(L)) {
      throw std::domain_error("FunctionClass: need 0 < m <= L < inf, got m=" +
                              std::to_string(m) + " L=" + std::to_string(L));
    }
  }
};

struct AlgorithmParams {
  double alpha = 0.0;
  double beta = 0.0;
  double eta = 0.0;
};

// Additive gradient noise: zero mean, covariance bounded by sigma2 * I_d.
struct NoiseModel {
  double sigma2 = 1.0;
  int d = 1;

  void validate() const {
    if (!(sigma2 >= 0.0) || d < 1) {
      throw std::domain_error("NoiseModel: need sigma2 >= 0 and d >= 1");
    }
  }
};

// State-space realization xi^{t+1} = A xi^t + B(u^t + w^t), y^t = C xi^t.
// A is n x n, B is n x 1, C is 1 x n.
struct StateSpace {
  Matrix A, B, C;

  int n() const { return static_cast<int>(A.rows()); }

  void validate() const {
    if (A.rows() != A.cols() || B.rows() != A.rows() || B.cols() != 1 ||
        C.rows() != 1 || C.cols() != A.cols()) {
      throw shape_error("StateSpace: expected A n x n, B n x 1, C 1 x n");
    }
  }

  // Deterministic fixed point: for any stationary y* there must be xi* with
  // xi* = A xi*, y* = C xi*. Equivalently ker(A - I) contains a vector not
  // annihilated by C.
  bool has_fixed_point(double tol = 1e-9) const {
    validate();
    Eigen::FullPivLU<Matrix> lu(A - Matrix::Identity(n(), n()));
    lu.setThreshold(tol);
    const Matrix ker = lu.kernel();
    if (lu.dimensionOfKernel() == 0) return false;
    return inf_norm(C * ker) > tol;
  }
};

// Two-state realization of the three-parameter family.
inline StateSpace to_state_space(const AlgorithmParams& p) {
  StateSpace s;
  s.A = Matrix{{1.0 + p.beta, -p.beta}, {1.0, 0.0}};
  s.B = Matrix{{-p.alpha}, {0.0}};
  s.C = Matrix{{1.0 + p.eta, -p.eta}};
  return s;
}

// Gradient Descent (alpha, 0, 0) has a degenerate family of equivalent
// parameterizations (alpha(1-beta), beta, beta/(1-beta)); all share the
// transfer function -alpha/(z-1).
inline AlgorithmParams gd_equivalent_family(double alpha, double beta) {
  if (beta == 1.0) {
    throw std::domain_error("gd_equivalent_family: beta = 1 is excluded");
  }
  return {alpha * (1.0 - beta), beta, beta / (1.0 - beta)};
}

enum class Tuning { GD_L, GD_2overLm, HB, FG, TM, RM };

inline std::string tuning_name(Tuning t) {
  switch (t) {
    case Tuning::GD_L: return "GD(1/L)";
    case Tuning::GD_2overLm: return "GD(2/(L+m))";
    case Tuning::HB: return "HB";
    case Tuning::FG: return "FG";
    case Tuning::TM: return "TM";
    case Tuning::RM: return "RM";
  }
  return "?";
}

// Standard tunings of the well-known methods. RM takes a rate parameter in
// [1 - sqrt(m/L), 1 - m/L]; the lower end recovers TM, the upper end GD(1/L).
inline AlgorithmParams standard_tuning(Tuning t, double m, double L,
                                       std::optional<double> rho_for_rm = {}) {
  FunctionClass{FunctionClassKind::Quadratic, m, L}.validate();
  const bool needs_gap =
      t == Tuning::HB || t == Tuning::FG || t == Tuning::TM || t == Tuning::RM;
  if (needs_gap && m == L) {
    throw std::domain_error(tuning_name(t) + ": tuning requires m < L");
  }
  const double sm = std::sqrt(m), sL = std::sqrt(L);
  switch (t) {
    case Tuning::GD_L:
      return {1.0 / L, 0.0, 0.0};
    case Tuning::GD_2overLm:
      return {2.0 / (L + m), 0.0, 0.0};
    case Tuning::HB: {
      const double r = (sL - sm) / (sL + sm);
      return {4.0 / ((sL + sm) * (sL + sm)), r * r, 0.0};
    }
    case Tuning::FG: {
      const double r = (sL - sm) / (sL + sm);
      return {1.0 / L, r, r};
    }
    case Tuning::TM: {
      // alpha = (1+rho)/L with rho = 1 - sqrt(m/L), i.e. (2*sqrt(L)-sqrt(m))/L^{3/2}.
      const double rho = 1.0 - sm / sL;
      return {(1.0 + rho) / L, (sL - sm) * (sL - sm) / (L + std::sqrt(m * L)),
              (sL - sm) * (sL - sm) / (2.0 * L - m + std::sqrt(m * L))};
    }
    case Tuning::RM: {
      if (!rho_for_rm) {
        throw std::domain_error("RM: rate parameter required");
      }
      const double rho = *rho_for_rm;
      const double lo = 1.0 - std::sqrt(m / L), hi = 1.0 - m / L;
      if (!(rho >= lo && rho <= hi)) {
        throw std::domain_error("RM: rate must lie in [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
      }
      const double om = 1.0 - rho;
      return {om * om * (1.0 + rho) / m, L * rho * rho * rho / (L - m),
              m * rho * rho * rho / ((L - m) * om * om * (1.0 + rho))};
    }
  }
  throw std::domain_error("standard_tuning: unknown tuning");
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x > lo && x < hi; }
};

// Necessary bounds on (alpha, alpha*eta, beta) for convergence on any of the
// three function classes: 0 < alpha < 4/L, |alpha*eta| < 2/(L-m), and a beta
// interval conditional on the sign of alpha*eta. When m = L the alpha*eta
// interval degenerates to all reals; this is reported via the flag rather
// than an arbitrary cutoff.
struct ParamBox {
  double m = 1.0, L = 1.0;
  Interval alpha;
  Interval alpha_eta;  // meaningful only if !alpha_eta_unbounded
  bool alpha_eta_unbounded = false;

  Interval beta_range(double ae) const {
    if (ae >= 0.0) return {-1.0 + L * ae, 1.0 + m * ae};
    return {-1.0 + m * ae, 1.0 + L * ae};
  }

  bool contains(const AlgorithmParams& p) const {
    if (!alpha.contains(p.alpha)) return false;
    const double ae = p.alpha * p.eta;
    if (!alpha_eta_unbounded && !alpha_eta.contains(ae)) return false;
    return beta_range(ae).contains(p.beta);
  }
};

inline ParamBox param_bounds(double m, double L) {
  FunctionClass{FunctionClassKind::Quadratic, m, L}.validate();
  ParamBox box;
  box.m = m;
  box.L = L;
  box.alpha = {0.0, 4.0 / L};
  if (m == L) {
    box.alpha_eta_unbounded = true;
    box.alpha_eta = {-std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()};
  } else {
    box.alpha_eta = {-2.0 / (L - m), 2.0 / (L - m)};
  }
  return box;
}

// Opaque proof record attached to a certified bound: the Lyapunov matrix and
// multipliers that make the underlying inequalities check out, plus context
// needed to re-verify them.
struct Certificate {
  std::map<std::string, Matrix> parts;
  double residual = 0.0;    // worst constraint violation at the solution
  int ell = 0;              // lifting dimension, when applicable
  bool balanced = false;    // whether a balancing transform was applied
  std::string kind;         // e.g. "quad-endpoints", "sector-rate", ...
};

struct PerfPoint {
  double rho = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  bool exact = false;  // exact value (quadratic class) vs certified upper bound
  Certificate certificate;
};

}  // namespace fomcert
