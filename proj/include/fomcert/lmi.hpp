#pragma once

// Modeling and solving of small dense linear matrix inequalities: feasibility
// with margin detection, minimization of a linear objective, a bisection
// driver, and a certificate-checking mode that verifies explicit solutions
// without running the solver.
//
// Problems are declared through affine matrix-valued expressions over named
// scalar/vector/matrix variables. The expressions are probed with unit
// assignments to extract coefficient blocks (and verified to be affine), so
// callers can write constraints in natural matrix notation.
//
// The solver is a log-det barrier interior-point method with Newton
// centering and an infeasible-start phase 1. All problems here are tiny
// (blocks up to ~20x20, a few hundred scalar unknowns), so everything is
// dense and single-threaded; concurrency happens across solves.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fomcert/errors.hpp"
#include "fomcert/linalg.hpp"

namespace fomcert::lmi {

enum class Sign { Free, NonNeg, Psd };

struct Variable {
  std::string name;
  int rows = 1, cols = 1;
  bool symmetric = false;
  Sign sign = Sign::Free;
  bool zero_diagonal = false;  // elementwise matrices: diagonal pinned to 0
  int offset = 0;              // first scalar unknown
  int count = 0;               // number of scalar unknowns
};

// Concrete values for all variables, in declaration order.
using Assignment = std::vector<Matrix>;

enum class SolveStatus { Feasible, Infeasible, Optimal, NumericalFailure };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Assignment values;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double max_violation = std::numeric_limits<double>::quiet_NaN();  // relative
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
  int newton_steps = 0;
  std::string message;

  bool ok() const {
    return status == SolveStatus::Feasible || status == SolveStatus::Optimal;
  }
};

struct SolveOptions;

class LmiProblem {
 public:
  using MatrixExpr = std::function<Matrix(const Assignment&)>;
  using ScalarExpr = std::function<double(const Assignment&)>;

  int add_scalar(std::string name, Sign sign = Sign::Free) {
    return add_var({std::move(name), 1, 1, false, sign});
  }
  int add_vector(std::string name, int n, Sign sign = Sign::Free) {
    return add_var({std::move(name), n, 1, false, sign});
  }
  int add_matrix(std::string name, int rows, int cols, Sign sign = Sign::Free,
                 bool zero_diagonal = false) {
    return add_var({std::move(name), rows, cols, false, sign, zero_diagonal});
  }
  int add_symmetric(std::string name, int n, Sign sign = Sign::Free) {
    return add_var({std::move(name), n, n, true, sign});
  }

  // Constraint: expr(vars) ⪯ 0 (negative semidefinite).
  void add_lmi(std::string name, MatrixExpr expr) {
    constraints_.push_back({std::move(name), false, std::move(expr)});
    compiled_ = false;
  }
  // Constraint: expr(vars) <= 0 elementwise (vector- or matrix-valued).
  void add_elementwise(std::string name, MatrixExpr expr) {
    constraints_.push_back({std::move(name), true, std::move(expr)});
    compiled_ = false;
  }
  void set_objective(ScalarExpr expr) {
    objective_ = std::move(expr);
    compiled_ = false;
  }

  // Extra margin added on the ⪯ 0 side of every LMI block (S + eps*scale*I ⪯ 0),
  // for problems whose feasibility must be strict.
  void set_strict_margin(double eps) {
    strict_margin_ = eps;
    compiled_ = false;
  }

  const std::vector<Variable>& variables() const { return vars_; }
  int num_unknowns() const { return num_unknowns_; }

  Assignment zero_assignment() const {
    Assignment a;
    a.reserve(vars_.size());
    for (const auto& v : vars_) a.push_back(Matrix::Zero(v.rows, v.cols));
    return a;
  }

  Assignment unpack(const Vector& x) const {
    Assignment a = zero_assignment();
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      const Variable& v = vars_[k];
      int idx = v.offset;
      if (v.symmetric) {
        for (int i = 0; i < v.rows; ++i)
          for (int j = i; j < v.cols; ++j) {
            a[k](i, j) = a[k](j, i) = x[idx++];
          }
      } else {
        for (int i = 0; i < v.rows; ++i)
          for (int j = 0; j < v.cols; ++j) {
            if (v.zero_diagonal && i == j) continue;
            a[k](i, j) = x[idx++];
          }
      }
    }
    return a;
  }

  Vector pack(const Assignment& a) const {
    Vector x = Vector::Zero(num_unknowns_);
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      const Variable& v = vars_[k];
      int idx = v.offset;
      if (v.symmetric) {
        for (int i = 0; i < v.rows; ++i)
          for (int j = i; j < v.cols; ++j) x[idx++] = a[k](i, j);
      } else {
        for (int i = 0; i < v.rows; ++i)
          for (int j = 0; j < v.cols; ++j) {
            if (v.zero_diagonal && i == j) continue;
            x[idx++] = a[k](i, j);
          }
      }
    }
    return x;
  }

  // --- compiled form ---------------------------------------------------

  struct Block {
    std::string name;
    Matrix c0;                                   // constant part, symmetric
    std::vector<std::pair<int, Matrix>> coeffs;  // unknown index -> coefficient
    double scale = 1.0;                          // for relative violations
  };

  struct LinearRows {
    std::vector<std::string> names;  // one per row
    Matrix r;                        // num_rows x N
    Vector b;
    Vector scale;
  };

  void compile() const {
    if (compiled_) return;
    blocks_.clear();
    rows_.names.clear();
    const int n = num_unknowns_;
    const Assignment zero = zero_assignment();

    std::vector<Matrix> row_r;  // per elementwise constraint
    std::vector<Vector> row_b;

    for (const auto& c : constraints_) {
      Matrix c0 = c.expr(zero);
      std::vector<std::pair<int, Matrix>> coeffs;
      std::vector<Matrix> all_coeffs(n);
      for (int i = 0; i < n; ++i) {
        Vector e = Vector::Zero(n);
        e[i] = 1.0;
        Matrix ci = c.expr(unpack(e)) - c0;
        all_coeffs[i] = ci;
        if (inf_norm(ci) > 0.0) coeffs.emplace_back(i, ci);
      }
      // affinity check with a deterministic pseudo-random probe
      {
        Vector x(n);
        for (int i = 0; i < n; ++i) x[i] = 0.5 + 0.37 * std::sin(2.1 * i + 0.3);
        Matrix predicted = c0;
        for (int i = 0; i < n; ++i) predicted += x[i] * all_coeffs[i];
        const Matrix actual = c.expr(unpack(x));
        double scale = 1.0 + inf_norm(actual);
        if (inf_norm(actual - predicted) > 1e-8 * scale) {
          throw std::invalid_argument("LmiProblem: constraint '" + c.name +
                                      "' is not affine in the variables");
        }
      }
      if (c.elementwise) {
        const int rows = static_cast<int>(c0.size());
        Matrix r = Matrix::Zero(rows, n);
        Vector b(rows);
        for (int k = 0; k < rows; ++k) b[k] = c0.reshaped()[k];
        for (const auto& [i, ci] : coeffs)
          for (int k = 0; k < rows; ++k) r(k, i) = ci.reshaped()[k];
        row_r.push_back(std::move(r));
        row_b.push_back(std::move(b));
        for (int k = 0; k < rows; ++k)
          rows_.names.push_back(c.name + "[" + std::to_string(k) + "]");
      } else {
        Block blk;
        blk.name = c.name;
        blk.c0 = require_symmetric(c0, 1e-8);
        blk.scale = 1.0 + inf_norm(blk.c0);
        if (strict_margin_ > 0.0) {
          blk.c0 += strict_margin_ * blk.scale *
                    Matrix::Identity(blk.c0.rows(), blk.c0.cols());
        }
        for (auto& [i, ci] : coeffs) {
          blk.coeffs.emplace_back(i, require_symmetric(ci, 1e-8));
        }
        blocks_.push_back(std::move(blk));
      }
    }

    // sign constraints on variables
    {
      std::vector<std::pair<int, std::string>> nonneg;  // unknown -> name
      for (const auto& v : vars_) {
        if (v.sign == Sign::NonNeg) {
          for (int i = 0; i < v.count; ++i)
            nonneg.emplace_back(v.offset + i, v.name);
        } else if (v.sign == Sign::Psd) {
          if (!v.symmetric) {
            throw std::invalid_argument("LmiProblem: PSD sign requires a symmetric variable: " + v.name);
          }
          Block blk;
          blk.name = v.name + " >= 0";
          blk.c0 = Matrix::Zero(v.rows, v.cols);
          int idx = v.offset;
          for (int i = 0; i < v.rows; ++i)
            for (int j = i; j < v.cols; ++j) {
              Matrix ci = Matrix::Zero(v.rows, v.cols);
              ci(i, j) = ci(j, i) = -1.0;
              blk.coeffs.emplace_back(idx++, std::move(ci));
            }
          blocks_.push_back(std::move(blk));
        }
      }
      if (!nonneg.empty()) {
        Matrix r = Matrix::Zero(static_cast<int>(nonneg.size()), n);
        Vector b = Vector::Zero(static_cast<int>(nonneg.size()));
        for (std::size_t k = 0; k < nonneg.size(); ++k) {
          r(static_cast<int>(k), nonneg[k].first) = -1.0;
          rows_.names.push_back(nonneg[k].second + " >= 0");
        }
        row_r.push_back(std::move(r));
        row_b.push_back(std::move(b));
      }
    }

    int total_rows = 0;
    for (const auto& r : row_r) total_rows += static_cast<int>(r.rows());
    rows_.r = Matrix::Zero(total_rows, n);
    rows_.b = Vector::Zero(total_rows);
    rows_.scale = Vector::Ones(total_rows);
    int at = 0;
    for (std::size_t k = 0; k < row_r.size(); ++k) {
      const int m = static_cast<int>(row_r[k].rows());
      rows_.r.middleRows(at, m) = row_r[k];
      rows_.b.segment(at, m) = row_b[k];
      for (int i = 0; i < m; ++i)
        rows_.scale[at + i] = 1.0 + std::abs(row_b[k][i]);
      at += m;
    }

    // objective c^T x + const
    obj_c_ = Vector::Zero(n);
    obj_const_ = 0.0;
    if (objective_) {
      obj_const_ = objective_(zero);
      for (int i = 0; i < n; ++i) {
        Vector e = Vector::Zero(n);
        e[i] = 1.0;
        obj_c_[i] = objective_(unpack(e)) - obj_const_;
      }
    }
    compiled_ = true;
  }

  bool has_objective() const { return static_cast<bool>(objective_); }
  const std::vector<Block>& blocks() const { compile(); return blocks_; }
  const LinearRows& linear_rows() const { compile(); return rows_; }
  const Vector& objective_coeffs() const { compile(); return obj_c_; }
  double objective_constant() const { compile(); return obj_const_; }

  std::string debug_dump() const;

 private:
  int add_var(Variable v) {
    if (compiled_) compiled_ = false;
    v.offset = num_unknowns_;
    if (v.symmetric) {
      if (v.rows != v.cols) throw shape_error("symmetric variable must be square");
      v.count = v.rows * (v.rows + 1) / 2;
    } else {
      v.count = v.rows * v.cols - (v.zero_diagonal ? std::min(v.rows, v.cols) : 0);
    }
    num_unknowns_ += v.count;
    vars_.push_back(std::move(v));
    return static_cast<int>(vars_.size()) - 1;
  }

  struct RawConstraint {
    std::string name;
    bool elementwise;
    MatrixExpr expr;
  };

  std::vector<Variable> vars_;
  std::vector<RawConstraint> constraints_;
  ScalarExpr objective_;
  double strict_margin_ = 0.0;
  int num_unknowns_ = 0;

  mutable bool compiled_ = false;
  mutable std::vector<Block> blocks_;
  mutable LinearRows rows_;
  mutable Vector obj_c_;
  mutable double obj_const_ = 0.0;
};

struct CheckReport {
  bool ok = false;
  double max_violation = 0.0;           // absolute, worst over constraints
  double max_relative_violation = 0.0;  // scaled by 1 + ||constant block||
  std::vector<std::pair<std::string, double>> per_constraint;
};

// Certificate-checking mode: verify explicit variable values against all
// constraints without running the solver.
inline CheckReport check_assignment(const LmiProblem& p, const Assignment& a,
                                    double tol = 1e-8) {
  p.compile();
  const Vector x = p.pack(a);
  CheckReport rep;
  for (const auto& blk : p.blocks()) {
    Matrix s = blk.c0;
    for (const auto& [i, ci] : blk.coeffs) s += x[i] * ci;
    const double v = max_eigenvalue(s);
    rep.per_constraint.emplace_back(blk.name, v);
    rep.max_violation = std::max(rep.max_violation, v);
    rep.max_relative_violation = std::max(rep.max_relative_violation, v / blk.scale);
  }
  const auto& rows = p.linear_rows();
  if (rows.r.rows() > 0) {
    const Vector v = rows.r * x + rows.b;
    for (int i = 0; i < v.size(); ++i) {
      rep.per_constraint.emplace_back(rows.names[i], v[i]);
      rep.max_violation = std::max(rep.max_violation, v[i]);
      rep.max_relative_violation =
          std::max(rep.max_relative_violation, v[i] / rows.scale[i]);
    }
  }
  rep.ok = rep.max_relative_violation <= tol;
  return rep;
}

struct SolveOptions {
  double feas_tol = 1e-8;   // relative feasibility tolerance
  double rel_gap = 1e-7;    // relative duality gap for objective problems
  int max_iter = 2000;      // total Newton step budget
  // Bound |x_i| <= var_bound on every scalar unknown. Feasible sets of
  // homogeneous LMIs are scale-free, so without a box the barrier has no
  // analytic center; genuine certificates sit far inside this bound.
  double var_bound = 1e8;
  const Assignment* warm_start = nullptr;
  // Pluggable backend: when set, solve() delegates to it.
  std::function<SdpSolution(const LmiProblem&, const SolveOptions&)> backend;
};

namespace detail {

// Internal standard form: min q^T z s.t. blocks C0 + sum z_i Ci ⪯ 0 and
// rows R z + b <= 0, where z may carry a trailing phase-1 slack.
struct BarrierProblem {
  int n = 0;
  std::vector<LmiProblem::Block> blocks;
  Matrix r;  // rows x n
  Vector b;
  Vector q;
  double nu = 0.0;  // total barrier degree

  struct State {
    Vector z;
    std::vector<Eigen::LLT<Matrix>> chol;  // of -S_j
    Vector row_slack;                      // -(Rz+b) > 0
    bool feasible = false;
  };

  void eval(State& st) const {
    st.chol.clear();
    st.chol.reserve(blocks.size());
    st.feasible = true;
    for (const auto& blk : blocks) {
      Matrix s = blk.c0;
      for (const auto& [i, ci] : blk.coeffs) s += st.z[i] * ci;
      Eigen::LLT<Matrix> llt((-s).eval());
      if (llt.info() != Eigen::Success) {
        st.feasible = false;
        return;
      }
      st.chol.push_back(std::move(llt));
    }
    if (r.rows() > 0) {
      st.row_slack = -(r * st.z + b);
      if ((st.row_slack.array() <= 0.0).any()) st.feasible = false;
    } else {
      st.row_slack.resize(0);
    }
  }

  double barrier_value(const State& st) const {
    double phi = 0.0;
    for (const auto& llt : st.chol) {
      const auto& l = llt.matrixLLT();
      for (Eigen::Index i = 0; i < l.rows(); ++i) phi -= 2.0 * std::log(l(i, i));
    }
    for (Eigen::Index i = 0; i < st.row_slack.size(); ++i)
      phi -= std::log(st.row_slack[i]);
    return phi;
  }

  void grad_hess(const State& st, double t, Vector& g, Matrix& h) const {
    g = t * q;
    h = Matrix::Zero(n, n);
    for (std::size_t jb = 0; jb < blocks.size(); ++jb) {
      const auto& blk = blocks[jb];
      const auto& llt = st.chol[jb];
      const int k = static_cast<int>(blk.coeffs.size());
      // W_i = L^{-1} C_i L^{-T}; grad_i += tr(Y C_i) = tr(W_i),
      // H_ik += tr(Y C_i Y C_k) = <W_i, W_k>_F.
      std::vector<Matrix> w(k);
      for (int a = 0; a < k; ++a) {
        Matrix tmp = llt.matrixL().solve(blk.coeffs[a].second);
        w[a] = llt.matrixL().solve(tmp.transpose().eval());
        g[blk.coeffs[a].first] += w[a].trace();
      }
      for (int a = 0; a < k; ++a) {
        for (int c = a; c < k; ++c) {
          const double hac = (w[a].array() * w[c].array()).sum();
          const int ia = blk.coeffs[a].first, ic = blk.coeffs[c].first;
          h(ia, ic) += hac;
          if (ia != ic) h(ic, ia) += hac;
        }
      }
    }
    for (Eigen::Index row = 0; row < st.row_slack.size(); ++row) {
      const double inv = 1.0 / st.row_slack[row];
      const auto ar = r.row(row);
      g += (inv * ar).transpose();
      h.noalias() += (inv * inv) * (ar.transpose() * ar);
    }
  }

  enum class CenterResult { Converged, EarlyExit, Stalled, OutOfBudget };

  // Damped Newton centering of t*q^T z + phi(z). The Newton system is
  // Jacobi-scaled first: curvatures across directions span many orders of
  // magnitude (box rows vs near-active cone faces), which plain LDLT cannot
  // absorb.
  CenterResult center(State& st, double t, int& step_budget, double tol,
                      int max_steps,
                      const std::function<bool(const State&)>& early_exit = {}) const {
    Vector g;
    Matrix h;
    for (int iter = 0; iter < max_steps; ++iter) {
      if (step_budget <= 0) return CenterResult::OutOfBudget;
      if (early_exit && early_exit(st)) return CenterResult::EarlyExit;
      grad_hess(st, t, g, h);
      Vector d = h.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      Matrix hs = d.asDiagonal() * h * d.asDiagonal();
      hs.diagonal().array() += 1e-13;
      Vector dz = d.asDiagonal() * Eigen::LDLT<Matrix>(hs).solve(
                                       (-(d.asDiagonal() * g)).eval());
      double decr2 = -g.dot(dz);
      if (!std::isfinite(decr2) || decr2 < 0.0) {
        hs.diagonal().array() += 1e-6;
        dz = d.asDiagonal() *
             Eigen::LDLT<Matrix>(hs).solve((-(d.asDiagonal() * g)).eval());
        decr2 = -g.dot(dz);
        if (!std::isfinite(decr2) || decr2 < 0.0) return CenterResult::Stalled;
      }
      if (decr2 * 0.5 <= tol) return CenterResult::Converged;
      // soft barrier modes can produce teleporting steps; keep each move
      // within a trust region of the current iterate's scale
      const double max_step = 10.0 * std::max(1.0, st.z.cwiseAbs().maxCoeff());
      const double step_norm = dz.cwiseAbs().maxCoeff();
      if (step_norm > max_step) {
        dz *= max_step / step_norm;
        decr2 = -g.dot(dz);
      }
      // the decrease is evaluated as a difference: at large t the absolute
      // objective t q^T z drowns the meaningful digits
      const double phi0 = barrier_value(st);
      const double qdz = q.dot(dz);
      double step = 1.0;
      State trial;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        trial.z = st.z + step * dz;
        eval(trial);
        if (trial.feasible) {
          const double df = t * step * qdz + (barrier_value(trial) - phi0);
          if (df <= -0.01 * step * decr2) {
            st = std::move(trial);
            moved = true;
            break;
          }
        }
        step *= 0.5;
      }
      --step_budget;
      if (!moved) {
        // no acceptable step at this precision; decrement already below a
        // loose threshold counts as centered for path-following purposes
        return decr2 * 0.5 <= std::max(tol, 1e-6) ? CenterResult::Converged
                                                  : CenterResult::Stalled;
      }
    }
    return CenterResult::Stalled;
  }
};

inline BarrierProblem make_barrier(const LmiProblem& p, bool phase1,
                                   double var_bound) {
  p.compile();
  BarrierProblem bp;
  const int nvars = p.num_unknowns();
  bp.n = nvars + (phase1 ? 1 : 0);
  bp.blocks = p.blocks();
  const auto& rows = p.linear_rows();
  const int base_rows = static_cast<int>(rows.r.rows());
  // two box rows per unknown (including the slack) keep the barrier bounded
  const int total_rows = base_rows + 2 * bp.n;
  bp.r = Matrix::Zero(total_rows, bp.n);
  bp.b = Vector::Zero(total_rows);
  bp.r.block(0, 0, base_rows, nvars) = rows.r;
  bp.b.head(base_rows) = rows.b;
  for (int i = 0; i < bp.n; ++i) {
    bp.r(base_rows + 2 * i, i) = 1.0;
    bp.b[base_rows + 2 * i] = -var_bound;
    bp.r(base_rows + 2 * i + 1, i) = -1.0;
    bp.b[base_rows + 2 * i + 1] = -var_bound;
  }
  if (phase1) {
    const int slack = bp.n - 1;
    for (auto& blk : bp.blocks) {
      // scale-relative slack keeps phase 1 even across blocks
      blk.coeffs.emplace_back(
          slack, (-blk.scale * Matrix::Identity(blk.c0.rows(), blk.c0.cols())).eval());
    }
    bp.r.block(0, slack, base_rows, 1) = -rows.scale;
    bp.q = Vector::Zero(bp.n);
    bp.q[slack] = 1.0;
  } else {
    bp.q = p.objective_coeffs();
  }
  for (const auto& blk : bp.blocks) bp.nu += static_cast<double>(blk.c0.rows());
  bp.nu += static_cast<double>(bp.b.size());
  return bp;
}

}  // namespace detail

// Relative violation of the compiled constraints at packed point x.
inline double relative_violation(const LmiProblem& p, const Vector& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& blk : p.blocks()) {
    Matrix s = blk.c0;
    for (const auto& [i, ci] : blk.coeffs) s += x[i] * ci;
    worst = std::max(worst, max_eigenvalue(s) / blk.scale);
  }
  const auto& rows = p.linear_rows();
  if (rows.r.rows() > 0) {
    const Vector v = (rows.r * x + rows.b).cwiseQuotient(rows.scale);
    worst = std::max(worst, v.maxCoeff());
  }
  return worst;
}

// Feasibility with margin detection and optional linear objective. Never
// silently returns unverified values: anything not meeting tolerances comes
// back as NumericalFailure (or Infeasible with a certified margin bound).
inline SdpSolution solve(const LmiProblem& p, const SolveOptions& opts = {}) {
  if (opts.backend) return opts.backend(p, opts);
  p.compile();
  SdpSolution out;

  // Certificate-checking path: a warm start that is already feasible decides
  // pure feasibility questions immediately.
  if (opts.warm_start && !p.has_objective()) {
    const auto rep = check_assignment(p, *opts.warm_start, opts.feas_tol);
    if (rep.ok) {
      out.status = SolveStatus::Feasible;
      out.values = *opts.warm_start;
      out.max_violation = rep.max_relative_violation;
      out.duality_gap = 0.0;
      return out;
    }
  }

  // ---- phase 1: minimize the feasibility slack ----
  detail::BarrierProblem ph1 = detail::make_barrier(p, /*phase1=*/true, opts.var_bound);
  const int n = p.num_unknowns();
  detail::BarrierProblem::State st;
  st.z = Vector::Zero(ph1.n);
  if (opts.warm_start) st.z.head(n) = p.pack(*opts.warm_start);
  st.z[n] = 0.0;
  // slack large enough for strict feasibility of the augmented problem
  {
    double s0 = relative_violation(p, st.z.head(n));
    st.z[n] = s0 + std::max(1.0, 0.1 * std::abs(s0));
  }
  ph1.eval(st);
  if (!st.feasible) {
    out.message = "phase 1: initial point infeasible";
    return out;
  }

  int budget = opts.max_iter;
  const double feas_target = opts.feas_tol;
  // For pure feasibility any strictly interior point settles the question;
  // objective problems benefit from a deeper interior start.
  const double exit_margin = p.has_objective() ? 1e-4 : 2.0 * opts.feas_tol;
  const auto deep_enough = [&](const detail::BarrierProblem::State& s) {
    return s.z[ph1.n - 1] < -exit_margin;
  };
  double t = std::max(1.0, ph1.nu / std::max(1.0, std::abs(st.z[n])));
  double gap = ph1.nu / t;
  double slack = st.z[n];
  double best_lb = -std::numeric_limits<double>::infinity();
  bool interior = false;
  bool stalled = false;
  using CR = detail::BarrierProblem::CenterResult;
  for (;;) {
    const CR cr = ph1.center(st, t, budget, 1e-9, 100, deep_enough);
    slack = st.z[n];
    gap = ph1.nu / t;
    if (deep_enough(st)) {
      interior = true;
      break;
    }
    // dual bound at a centered point: min slack >= slack - nu/t.
    // Infeasibility means a margin below -feas_tol is certified unattainable
    // while no point within +feas_tol was found.
    if (cr == CR::Converged) best_lb = std::max(best_lb, slack - gap);
    if (best_lb > -feas_target && slack > feas_target) break;
    if (gap <= 0.25 * feas_target) break;  // resolved down to the tolerance window
    if (cr == CR::OutOfBudget) {
      stalled = true;
      break;
    }
    t *= 20.0;
  }

  Vector x = st.z.head(n);
  const double viol1 = relative_violation(p, x);

  if (!interior && viol1 > feas_target) {
    if (best_lb > -feas_target) {
      out.status = SolveStatus::Infeasible;
      out.objective = slack;
      out.duality_gap = gap;
      out.max_violation = viol1;
      out.message = "certified: no point with relative margin below " +
                    std::to_string(-feas_target) + " (best bound " +
                    std::to_string(best_lb) + ")";
      out.values = p.unpack(x);
      return out;
    }
    out.message = stalled ? "phase 1: stalled at slack " + std::to_string(slack)
                          : "phase 1: undecided at slack " + std::to_string(slack);
    out.newton_steps = opts.max_iter - budget;
    return out;
  }

  if (!p.has_objective()) {
    out.status = SolveStatus::Feasible;
    out.values = p.unpack(x);
    out.objective = 0.0;
    out.max_violation = viol1;
    out.duality_gap = gap;
    out.newton_steps = opts.max_iter - budget;
    return out;
  }

  // ---- phase 2: follow the central path on the true objective ----
  if (!(viol1 < 0.0)) {
    out.message = "phase 2: no strictly interior start (margin " +
                  std::to_string(viol1) + ")";
    return out;
  }
  detail::BarrierProblem ph2 = detail::make_barrier(p, /*phase1=*/false, opts.var_bound);
  detail::BarrierProblem::State st2;
  st2.z = x;
  ph2.eval(st2);
  if (!st2.feasible) {
    out.message = "phase 2: start infeasible";
    return out;
  }
  double obj = ph2.q.dot(st2.z) + p.objective_constant();
  t = std::max(1.0, ph2.nu / std::max(1.0, std::abs(obj)));
  // the duality gap nu/t is certified only at converged centerings; the
  // reported solution is the last such point
  double certified_gap = std::numeric_limits<double>::infinity();
  detail::BarrierProblem::State snapshot = st2;
  bool have_snapshot = false;
  while (budget > 0) {
    const CR cr = ph2.center(st2, t, budget, 1e-9, 300);
    obj = ph2.q.dot(st2.z) + p.objective_constant();
    gap = ph2.nu / t;
    const double target = opts.rel_gap * (1.0 + std::abs(obj));
    if (cr == CR::Converged) {
      certified_gap = gap;
      snapshot = st2;
      have_snapshot = true;
    }
    if (certified_gap <= target) {
      out.status = SolveStatus::Optimal;
      break;
    }
    if (cr != CR::Converged) break;  // precision wall or budget
    t *= gap < 300.0 * target ? 3.0 : 20.0;
  }
  const detail::BarrierProblem::State& fin = have_snapshot ? snapshot : st2;
  out.values = p.unpack(fin.z);
  out.objective = ph2.q.dot(fin.z) + p.objective_constant();
  out.duality_gap = certified_gap;
  out.max_violation = relative_violation(p, fin.z);
  out.newton_steps = opts.max_iter - budget;
  if (out.status != SolveStatus::Optimal) {
    if (have_snapshot) {
      // verified feasible point with an honest certified gap, short of the
      // requested tolerance
      out.status = SolveStatus::Feasible;
      out.message = "precision-limited: certified relative gap " +
                    std::to_string(certified_gap);
    } else {
      out.status = SolveStatus::NumericalFailure;
      out.message = "phase 2: no centered point reached";
    }
  }
  return out;
}

// Bisection on a monotone feasibility predicate. Returns the smallest value
// certified feasible within absolute tolerance tol, or nullopt when the
// predicate fails at hi (no certificate anywhere in the bracket).
inline std::optional<double> bisect_rho(const std::function<bool(double)>& feasible_at,
                                        double lo, double hi, double tol = 1e-6) {
  if (!(lo < hi)) throw std::domain_error("bisect_rho: need lo < hi");
  if (!feasible_at(hi)) return std::nullopt;
  if (feasible_at(lo)) return lo;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

inline std::string LmiProblem::debug_dump() const {
  compile();
  std::ostringstream os;
  os.precision(17);
  os << "lmi problem: " << num_unknowns_ << " unknowns\n";
  for (const auto& v : vars_) {
    os << "  var " << v.name << " " << v.rows << "x" << v.cols
       << (v.symmetric ? " symmetric" : "")
       << (v.sign == Sign::NonNeg ? " nonneg" : v.sign == Sign::Psd ? " psd" : "")
       << (v.zero_diagonal ? " zero-diag" : "") << " offset " << v.offset
       << " count " << v.count << "\n";
  }
  for (const auto& blk : blocks_) {
    os << "block '" << blk.name << "' (" << blk.c0.rows() << "x" << blk.c0.cols()
       << ") ⪯ 0\n  const:\n" << blk.c0 << "\n";
    for (const auto& [i, ci] : blk.coeffs) {
      os << "  coeff x[" << i << "]:\n" << ci << "\n";
    }
  }
  if (rows_.r.rows() > 0) {
    os << "linear rows (R z + b <= 0):\n  R:\n" << rows_.r << "\n  b: "
       << rows_.b.transpose() << "\n";
  }
  if (objective_) {
    os << "objective: c = " << obj_c_.transpose() << " const " << obj_const_ << "\n";
  }
  return os.str();
}

}  // namespace fomcert::lmi
