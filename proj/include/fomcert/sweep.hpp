#pragma once

// Brute-force (rho, gamma) point clouds over the three-parameter family and
// Pareto-front extraction. The parameter box is gridded as alpha (log scale),
// then alpha*eta, then beta (both linear), nested per the admissibility
// bounds. Grid points are independent work items; results are merged in grid
// order so runs are deterministic regardless of worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fomcert/core.hpp"
#include "fomcert/quadratic.hpp"
#include "fomcert/sector.hpp"
#include "fomcert/smooth.hpp"

namespace fomcert {

struct SweepConfig {
  FunctionClass function_class{FunctionClassKind::Quadratic, 1.0, 10.0};
  NoiseModel noise{1.0, 1};
  int n_alpha = 200;
  int n_alpha_eta = 101;
  int n_beta = 100;
  double alpha_min = 1e-5;
  int ell_rate = 1;    // F class only
  int ell_gamma = 6;   // F class only
  bool balance = true;
  double rate_tol = 1e-6;
  int workers = 0;  // 0: FOMCERT_WORKERS env var, else hardware concurrency

  void validate() const {
    function_class.validate();
    noise.validate();
    if (n_alpha < 2 || n_alpha_eta < 2 || n_beta < 2) {
      throw std::domain_error("SweepConfig: grid sizes must be >= 2");
    }
    if (function_class.m == function_class.L) {
      throw std::domain_error("SweepConfig: m = L leaves alpha*eta unbounded");
    }
    if (!(alpha_min > 0.0 && alpha_min < 4.0 / function_class.L)) {
      throw std::domain_error("SweepConfig: alpha_min outside (0, 4/L)");
    }
  }

  long total_points() const {
    return static_cast<long>(n_alpha) * n_alpha_eta * n_beta;
  }
};

enum class SweepStatus { Ok, Diverged, Failed };

inline std::string to_string(SweepStatus s) {
  switch (s) {
    case SweepStatus::Ok: return "ok";
    case SweepStatus::Diverged: return "diverged";
    case SweepStatus::Failed: return "error";
  }
  return "?";
}

struct SweepPoint {
  AlgorithmParams params;
  double rho = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> gamma;
  SweepStatus status = SweepStatus::Failed;
};

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FOMCERT_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

inline AlgorithmParams grid_point(const SweepConfig& cfg, long index) {
  const ParamBox box = param_bounds(cfg.function_class.m, cfg.function_class.L);
  const long ib = index % cfg.n_beta;
  const long ie = (index / cfg.n_beta) % cfg.n_alpha_eta;
  const long ia = index / (static_cast<long>(cfg.n_beta) * cfg.n_alpha_eta);
  const double la = std::log(cfg.alpha_min);
  const double lb = std::log(4.0 / cfg.function_class.L);
  const double alpha =
      std::exp(la + (lb - la) * static_cast<double>(ia) / (cfg.n_alpha - 1));
  const double ae = box.alpha_eta.lo + (box.alpha_eta.hi - box.alpha_eta.lo) *
                                           static_cast<double>(ie) /
                                           (cfg.n_alpha_eta - 1);
  const Interval br = box.beta_range(ae);
  const double beta =
      br.lo + (br.hi - br.lo) * static_cast<double>(ib) / (cfg.n_beta - 1);
  return {alpha, beta, ae / alpha};
}

inline SweepPoint evaluate_point(const SweepConfig& cfg, const AlgorithmParams& p) {
  SweepPoint pt;
  pt.params = p;
  const double m = cfg.function_class.m, L = cfg.function_class.L;
  try {
    switch (cfg.function_class.kind) {
      case FunctionClassKind::Quadratic: {
        pt.rho = quad_rate(p, m, L);
        if (pt.rho < 1.0) {
          pt.gamma = quad_sensitivity(p, m, L, cfg.noise);
          pt.status = SweepStatus::Ok;
        } else {
          pt.status = SweepStatus::Diverged;
        }
        break;
      }
      case FunctionClassKind::OnePointStronglyConvex: {
        const StateSpace s = to_state_space(p);
        pt.rho = sector_rate(s, m, L, cfg.rate_tol).rho;
        if (pt.rho < 1.0) {
          pt.gamma = sector_gamma(s, m, L, cfg.noise).gamma;
          pt.status = SweepStatus::Ok;
        } else {
          pt.status = SweepStatus::Diverged;
        }
        break;
      }
      case FunctionClassKind::SmoothStronglyConvex: {
        const StateSpace s = to_state_space(p);
        SmoothOptions opts;
        opts.ell = cfg.ell_rate;
        opts.tol = cfg.rate_tol;
        opts.balance = cfg.balance;
        pt.rho = smooth_rate(s, m, L, opts).rho;
        if (pt.rho < 1.0) {
          opts.ell = cfg.ell_gamma;
          pt.gamma = smooth_gamma(s, m, L, cfg.noise, opts).gamma;
          pt.status = SweepStatus::Ok;
        } else {
          pt.status = SweepStatus::Diverged;
        }
        break;
      }
    }
  } catch (const std::exception&) {
    pt.status = SweepStatus::Failed;
    pt.gamma.reset();
  }
  return pt;
}

}  // namespace detail

// Evaluates grid indices [begin, end). Per-point failures are recorded in the
// status field, never aborting the sweep, and the returned order is the grid
// order independent of scheduling.
inline std::vector<SweepPoint> run_sweep_range(const SweepConfig& cfg, long begin,
                                               long end) {
  cfg.validate();
  begin = std::clamp(begin, 0L, cfg.total_points());
  end = std::clamp(end, begin, cfg.total_points());
  std::vector<SweepPoint> out(static_cast<std::size_t>(end - begin));
  const int workers = std::min<long>(resolve_workers(cfg.workers), end - begin);
  if (workers <= 1) {
    for (long i = begin; i < end; ++i) {
      out[static_cast<std::size_t>(i - begin)] =
          detail::evaluate_point(cfg, detail::grid_point(cfg, i));
    }
    return out;
  }
  std::atomic<long> next(begin);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= end) return;
        out[static_cast<std::size_t>(i - begin)] =
            detail::evaluate_point(cfg, detail::grid_point(cfg, i));
      }
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

inline std::vector<SweepPoint> run_sweep(const SweepConfig& cfg) {
  return run_sweep_range(cfg, 0, cfg.total_points());
}

// Points not dominated in (rho, gamma): both coordinates <= with at least one
// strict. Points without a finite gamma never enter the front. Result is
// sorted by rho.
inline std::vector<SweepPoint> pareto_front(const std::vector<SweepPoint>& points) {
  std::vector<SweepPoint> cand;
  for (const auto& p : points) {
    if (p.status == SweepStatus::Ok && p.gamma && std::isfinite(p.rho) &&
        std::isfinite(*p.gamma)) {
      cand.push_back(p);
    }
  }
  std::sort(cand.begin(), cand.end(), [](const SweepPoint& a, const SweepPoint& b) {
    if (a.rho != b.rho) return a.rho < b.rho;
    return *a.gamma < *b.gamma;
  });
  std::vector<SweepPoint> front;
  double best_before = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < cand.size()) {
    std::size_t j = i;
    while (j < cand.size() && cand[j].rho == cand[i].rho) ++j;
    const double group_min = *cand[i].gamma;
    for (std::size_t k = i; k < j; ++k) {
      const double g = *cand[k].gamma;
      const bool dominated_earlier = best_before <= g;     // strictly smaller rho
      const bool dominated_in_group = g > group_min;       // equal rho, smaller gamma
      if (!dominated_earlier && !dominated_in_group) front.push_back(cand[k]);
    }
    best_before = std::min(best_before, group_min);
    i = j;
  }
  return front;
}

struct ComplexityView {
  std::vector<std::pair<double, double>> points;  // (-1/log rho, gamma^2)
  double slope = std::numeric_limits<double>::quiet_NaN();
};

// Least-squares slope of log y against log x.
inline double fit_loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [x, y] : pts) {
    if (!(x > 0.0) || !(y > 0.0)) continue;
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Transforms points with rho in (0,1) to iteration-complexity coordinates and
// fits the log-log slope over the largest decade of the abscissa.
inline ComplexityView iteration_complexity_view(const std::vector<SweepPoint>& points) {
  ComplexityView view;
  for (const auto& p : points) {
    if (!(p.rho > 0.0 && p.rho < 1.0) || !p.gamma) continue;
    view.points.emplace_back(-1.0 / std::log(p.rho), *p.gamma * *p.gamma);
  }
  if (view.points.empty()) return view;
  double xmax = 0.0;
  for (const auto& [x, _] : view.points) xmax = std::max(xmax, x);
  std::vector<std::pair<double, double>> decade;
  for (const auto& pt : view.points) {
    if (pt.first >= xmax / 10.0) decade.push_back(pt);
  }
  view.slope = fit_loglog_slope(decade);
  return view;
}

// --- CSV interface ---------------------------------------------------------

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_sweep_csv_header(std::ostream& os) {
  os << "alpha,beta,eta,rho,gamma,status\n";
}

inline void write_sweep_csv_row(std::ostream& os, const SweepPoint& p) {
  os << format_g17(p.params.alpha) << ',' << format_g17(p.params.beta) << ','
     << format_g17(p.params.eta) << ',' << format_g17(p.rho) << ','
     << (p.gamma ? format_g17(*p.gamma) : std::string()) << ','
     << to_string(p.status) << '\n';
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& pts) {
  write_sweep_csv_header(os);
  for (const auto& p : pts) write_sweep_csv_row(os, p);
}

inline std::vector<SweepPoint> read_sweep_csv(std::istream& is) {
  std::vector<SweepPoint> out;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("alpha,", 0) == 0) continue;
    }
    std::array<std::string, 6> field;
    std::size_t start = 0;
    for (int f = 0; f < 6; ++f) {
      const std::size_t comma = line.find(',', start);
      field[f] = line.substr(start, comma == std::string::npos ? std::string::npos
                                                               : comma - start);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    SweepPoint p;
    p.params = {std::strtod(field[0].c_str(), nullptr),
                std::strtod(field[1].c_str(), nullptr),
                std::strtod(field[2].c_str(), nullptr)};
    p.rho = std::strtod(field[3].c_str(), nullptr);
    if (!field[4].empty()) p.gamma = std::strtod(field[4].c_str(), nullptr);
    p.status = field[5] == "ok"        ? SweepStatus::Ok
               : field[5] == "diverged" ? SweepStatus::Diverged
                                        : SweepStatus::Failed;
    out.push_back(p);
  }
  return out;
}

}  // namespace fomcert
