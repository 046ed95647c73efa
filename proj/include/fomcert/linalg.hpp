#pragma once

// Small dense linear-algebra kernel used throughout: symmetric
// eigendecomposition, spectral radius, Cholesky-based checks, discrete
// Lyapunov solves and Kronecker products. Everything is double precision and
// sized for state dimensions of at most a few dozen.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "fomcert/errors.hpp"

namespace fomcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double inf_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Checks ||M - M^T||_inf <= tol * (1 + ||M||_inf) and returns (M + M^T)/2.
// Assembling LMIs introduces roundoff asymmetry, so inputs are symmetrized
// after the check.
inline Matrix require_symmetric(const Matrix& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) {
    throw shape_error("require_symmetric: matrix is not square (" +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
  }
  const double asym = inf_norm(m - m.transpose());
  if (asym > tol * (1.0 + inf_norm(m))) {
    throw shape_error("require_symmetric: asymmetry " + std::to_string(asym) +
                      " exceeds tolerance");
  }
  return 0.5 * (m + m.transpose());
}

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, M * vectors = vectors * diag(values)
};

inline SymEig sym_eig(const Matrix& m) {
  const Matrix s = require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) {
    throw numerical_error("sym_eig: eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

inline double max_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return sym_eig(m).values.maxCoeff();
}

inline double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return sym_eig(m).values.minCoeff();
}

// Largest eigenvalue magnitude. For n <= 2 this is done in closed form from
// trace and determinant; larger matrices go through the general eigensolver.
inline double spectral_radius(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw shape_error("spectral_radius: matrix is not square");
  }
  const Eigen::Index n = m.rows();
  if (n == 0) return 0.0;
  if (n > 64) {
    throw shape_error("spectral_radius: dimension cap is 64");
  }
  if (n == 1) return std::abs(m(0, 0));
  if (n == 2) {
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = tr * tr - 4.0 * det;
    if (disc < 0.0) return std::sqrt(det);  // complex pair, |z|^2 = det
    const double r = std::sqrt(disc);
    return 0.5 * (std::abs(tr) + r);
  }
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw numerical_error("spectral_radius: eigensolver did not converge");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Solves F^T P F - P + W = 0 for symmetric P via Kronecker vectorization
// (an n^2 x n^2 dense solve). Requires spectral_radius(F) < 1.
inline Matrix solve_discrete_lyapunov(const Matrix& f, const Matrix& w) {
  if (f.rows() != f.cols()) {
    throw shape_error("solve_discrete_lyapunov: F is not square");
  }
  const Matrix ws = require_symmetric(w);
  if (ws.rows() != f.rows()) {
    throw shape_error("solve_discrete_lyapunov: W size does not match F");
  }
  const double radius = spectral_radius(f);
  if (!(radius < 1.0)) {
    throw instability_error("solve_discrete_lyapunov: spectral radius " +
                            std::to_string(radius) + " >= 1");
  }
  const Eigen::Index n = f.rows();
  // vec(F^T P F) = (F^T (x) F^T) vec(P) with column-major vec.
  const Matrix ft = f.transpose();
  Matrix lhs = kron(ft, ft) - Matrix::Identity(n * n, n * n);
  Vector rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) rhs.segment(j * n, n) = -ws.col(j);
  const Vector vec_p = lhs.partialPivLu().solve(rhs);
  Matrix p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) p.col(j) = vec_p.segment(j * n, n);
  p = 0.5 * (p + p.transpose());
  const double resid = inf_norm(ft * p * f - p + ws);
  if (resid > 1e-9 * (1.0 + inf_norm(ws))) {
    throw numerical_error("solve_discrete_lyapunov: residual " +
                          std::to_string(resid) + " too large");
  }
  return p;
}

}  // namespace fomcert
