// Acceptance suite: end-to-end checks of the certified analyses, designs,
// sweeps and simulations against their published reference values. Prints one
// pass/fail line per criterion and exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fomcert/core.hpp"
#include "fomcert/designs.hpp"
#include "fomcert/quadratic.hpp"
#include "fomcert/sector.hpp"
#include "fomcert/simulate.hpp"
#include "fomcert/smooth.hpp"
#include "fomcert/sweep.hpp"

using namespace fomcert;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail, double seconds) {
  if (!ok) ++failures;
  std::printf("%s  criterion %2d: %s  [%.1f s]\n", ok ? "PASS" : "FAIL", criterion,
              detail.c_str(), seconds);
  std::fflush(stdout);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

AlgorithmParams sample_box(const ParamBox& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AlgorithmParams p;
  p.alpha = box.alpha.lo + (box.alpha.hi - box.alpha.lo) * u(rng);
  const double ae = box.alpha_eta.lo + (box.alpha_eta.hi - box.alpha_eta.lo) * u(rng);
  const auto br = box.beta_range(ae);
  p.beta = br.lo + (br.hi - br.lo) * u(rng);
  p.eta = ae / p.alpha;
  return p;
}

// 1. Closed forms against the spectral-radius + Lyapunov path, 500 samples.
void criterion1() {
  Timer timer;
  const double m = 1.0, L = 10.0;
  const NoiseModel noise{1.0, 1};
  std::mt19937_64 rng(12345);
  const auto box = param_bounds(m, L);
  double worst = 0.0;
  int compared = 0;
  for (int i = 0; i < 500; ++i) {
    const AlgorithmParams p = sample_box(box, rng);
    const StateSpace s = to_state_space(p);
    const double rc = quad_rate(p, m, L);
    const double rg = quad_rate_general(s, m, L);
    worst = std::max(worst, std::abs(rc - rg) / (1.0 + rc));
    if (rc < 1.0) {
      ++compared;
      const double gc = quad_sensitivity(p, m, L, noise);
      const double gg = quad_sensitivity_general(s, m, L, noise);
      worst = std::max(worst, std::abs(gc - gg) / (1.0 + gc));
    }
  }
  std::ostringstream os;
  os << "closed form vs oracle on Q_{1,10}: max relative deviation " << worst
     << " <= 1e-10 over 500 samples (" << compared << " stable)";
  report(1, worst <= 1e-10 && timer.seconds() < 5.0, os.str(), timer.seconds());
}

// 2. GD tightness over the sector class.
void criterion2() {
  Timer timer;
  const double m = 1.0, L = 10.0;
  const NoiseModel noise{1.0, 1};
  bool ok = true;
  std::ostringstream os;
  os << "GD tightness:";
  for (double rho : {0.82, 0.90, 0.99}) {
    const StateSpace s = to_state_space({(1.0 - rho) / m, 0.0, 0.0});
    const double rate = sector_rate(s, m, L).rho;
    const double gamma = sector_gamma(s, m, L, noise).gamma;
    const double gamma_ref = std::sqrt((1.0 - rho) / (1.0 + rho)) / m;
    ok = ok && std::abs(rate - rho) <= 2e-6 && std::abs(gamma - gamma_ref) <= 1e-4;
    os << " rho=" << rho << ": (" << rate << ", " << gamma << ")";
  }
  report(2, ok && timer.seconds() < 10.0, os.str(), timer.seconds());
}

// 3. Published lifted-analysis values for Nesterov's method at m=1, L=100.
void criterion3() {
  Timer timer;
  const double m = 1.0, L = 100.0;
  const NoiseModel noise{1.0, 1};
  const StateSpace s = to_state_space(standard_tuning(Tuning::FG, m, L));
  SmoothOptions opts;
  opts.ell = 1;
  const double rate1 = smooth_rate(s, m, L, opts).rho;
  std::vector<double> gammas;
  for (int ell = 0; ell <= 6; ++ell) {
    opts.ell = ell;
    gammas.push_back(smooth_gamma(s, m, L, noise, opts).gamma);
  }
  bool monotone = true;
  for (int ell = 1; ell <= 6; ++ell) {
    monotone = monotone && gammas[ell] <= gammas[ell - 1] + 1e-5;
  }
  const bool ok = std::abs(rate1 - 0.92793) <= 1e-3 &&
                  std::abs(gammas[1] - 0.20077) <= 1e-3 &&
                  std::abs(gammas[6] - 0.18349) <= 1e-3 && monotone;
  std::ostringstream os;
  os << "FG on F_{1,100}: rho(ell=1)=" << rate1 << ", gamma(ell=1)=" << gammas[1]
     << ", gamma(ell=6)=" << gammas[6] << ", non-increasing over ell=0..6: "
     << (monotone ? "yes" : "no");
  report(3, ok && timer.seconds() < 120.0, os.str(), timer.seconds());
}

// 4. Published design fixtures at m=1, L=2.
void criterion4() {
  Timer timer;
  const double m = 1.0, L = 2.0;
  const NoiseModel noise{1.0, 1};
  const auto opt = rgd_optimize(0.9, m, L, noise);
  const StateSpace ram_s = to_state_space(ram(0.9, m, L));
  SmoothOptions opts;
  opts.ell = 1;
  const double ram_rate = smooth_rate(ram_s, m, L, opts).rho;
  opts.ell = 6;
  const double ram_gamma = smooth_gamma(ram_s, m, L, noise, opts).gamma;
  const StateSpace var_s = to_state_space({0.019, 0.66, 0.0});
  const double var_gamma = smooth_gamma(var_s, m, L, noise, opts).gamma;
  const bool ok = std::abs(opt.gamma - 0.1981) <= 1e-3 &&
                  std::abs(ram_rate - 0.9000) <= 1e-4 &&
                  std::abs(ram_gamma - 0.22057) <= 1e-3 &&
                  std::abs(var_gamma - 0.1676) <= 1e-3;
  std::ostringstream os;
  os << "S/F fixtures at m=1, L=2, rho=0.9: RGD gamma=" << opt.gamma
     << ", RAM (rho, gamma)=(" << ram_rate << ", " << ram_gamma
     << "), eta=0 variant gamma=" << var_gamma;
  report(4, ok && timer.seconds() < 120.0, os.str(), timer.seconds());
}

// 5. Certificate-checking mode on the explicit closed-form certificates.
void criterion5() {
  Timer timer;
  bool ok = true;
  double worst = 0.0;
  // GD: scalar realization, explicit (P, lambda)
  {
    const double m = 1.0, L = 10.0;
    for (double rho : {0.82, 0.9, 0.99}) {
      StateSpace s;
      s.A = Matrix::Constant(1, 1, 1.0);
      s.B = Matrix::Constant(1, 1, -(1.0 - rho) / m);
      s.C = Matrix::Constant(1, 1, 1.0);
      const Matrix p = Matrix::Constant(1, 1, 1.0 / (1.0 - rho * rho));
      const double lam = rho / (m * (L - m) * (rho + 1.0));
      const auto rate_rep = sector_check_rate(s, m, L, rho, p, lam, 1e-7);
      const auto gam_rep = sector_check_gamma(s, m, L, p, lam, 1e-7);
      ok = ok && rate_rep.ok && gam_rep.ok;
      worst = std::max({worst, rate_rep.max_violation, gam_rep.max_violation});
    }
  }
  // RGD: explicit P at 20 random valid (rho, alpha), both L = 2 and L = 10
  {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int i = 0; i < 20; ++i) {
      const double m = 1.0, L = (i % 2 == 0) ? 2.0 : 10.0;
      const double lo = gd_min_rate(m, L);
      const double rho = lo + (0.99 - lo) * u(rng);
      const auto ar = rgd_alpha_range(rho, m);
      const double alpha = ar.lo + (ar.hi - ar.lo) * u(rng);
      const Matrix p = rgd_certificate_P(rho, m, L, alpha);
      const auto rep = sector_check_rate(to_state_space(rgd(rho, m, L, alpha)), m, L,
                                         rho, p, 1.0, 1e-7);
      ok = ok && rep.ok;
      worst = std::max(worst, rep.max_violation);
    }
  }
  // RAM: explicit Q at 10 rate samples
  {
    const double m = 1.0, L = 10.0;
    const double lo = ram_min_rate(m, L);
    for (int k = 1; k <= 10; ++k) {
      const double rho = lo + (0.99 - lo) * k / 10.0;
      const StateSpace s = to_state_space(ram(rho, m, L));
      const auto cert = iqc_certificate_scaled(s, m, L, rho, ram_certificate_Q(rho, m, L));
      const auto rep = check_smooth_rate_certificate(s, m, L, cert, 1e-7);
      ok = ok && rep.ok;
      worst = std::max(worst, rep.max_violation);
    }
  }
  std::ostringstream os;
  os << "explicit GD/RGD/RAM certificates accepted, worst residual " << worst;
  report(5, ok, os.str(), timer.seconds());
}

// 6. Desk-scale Pareto sweep over Q_{1,10}.
void criterion6() {
  Timer timer;
  SweepConfig cfg;
  cfg.function_class = {FunctionClassKind::Quadratic, 1.0, 10.0};
  cfg.noise = {1.0, 1};
  cfg.n_alpha = 200;
  cfg.n_alpha_eta = 101;
  cfg.n_beta = 100;
  auto pts = run_sweep(cfg);
  const double m = 1.0, L = 10.0;
  const double rho_min = rhb_min_rate(m, L);
  long ok_points = 0;
  bool frontier_ok = true;
  double worst_gap = 0.0;
  for (const auto& p : pts) {
    if (p.status != SweepStatus::Ok) continue;
    ++ok_points;
    if (p.rho < rho_min - 1e-9) {
      frontier_ok = false;
      continue;
    }
    const double fr = rhb(std::max(p.rho, rho_min), m, L).gamma(cfg.noise);
    const double gap = fr * fr - *p.gamma * *p.gamma;  // positive would undercut
    worst_gap = std::max(worst_gap, gap);
    frontier_ok = frontier_ok && gap <= 1e-9;
  }
  // inject RHB samples and require them to survive the front
  std::vector<double> marks;
  for (double rho = 0.55; rho <= 0.96; rho += 0.05) {
    const auto d = rhb(rho, m, L);
    SweepPoint pt;
    pt.params = d.params;
    pt.rho = rho;
    pt.gamma = d.gamma(cfg.noise);
    pt.status = SweepStatus::Ok;
    pts.push_back(pt);
    marks.push_back(rho);
  }
  const auto front = pareto_front(pts);
  bool survived = true;
  for (double rho : marks) {
    bool found = false;
    for (const auto& f : front) found = found || f.rho == rho;
    survived = survived && found;
  }
  std::ostringstream os;
  os << "Q_{1,10} sweep 200x101x100 (" << ok_points
     << " certified points): worst undercut of the RHB curve " << worst_gap
     << " <= 1e-9; injected RHB samples survive the front: "
     << (survived ? "yes" : "no");
  report(6, frontier_ok && survived && timer.seconds() < 600.0, os.str(),
         timer.seconds());
}

// 7. Class nesting of the certified bounds.
void criterion7() {
  Timer timer;
  const double m = 1.0, L = 10.0;
  const NoiseModel noise{1.0, 1};
  std::mt19937_64 rng(4242);
  const auto box = param_bounds(m, L);
  bool ok = true;
  int tested = 0;
  while (tested < 50) {
    const AlgorithmParams p = sample_box(box, rng);
    const StateSpace s = to_state_space(p);
    const auto sec = sector_rate(s, m, L);
    if (!(sec.rho < 1.0)) continue;
    ++tested;
    const double rate_q = quad_rate(p, m, L);
    SmoothOptions opts;
    opts.ell = 1;
    const double rate_f = smooth_rate(s, m, L, opts).rho;
    const double gam_q = quad_sensitivity(p, m, L, noise);
    opts.ell = 6;
    const double gam_f = smooth_gamma(s, m, L, noise, opts).gamma;
    const double gam_s = sector_gamma(s, m, L, noise).gamma;
    ok = ok && gam_q <= gam_f + 1e-5 && gam_f + 1e-5 <= gam_s + 2e-5;
    ok = ok && rate_q <= rate_f + 1e-5 && rate_f <= sec.rho + 1e-5;
  }
  std::ostringstream os;
  os << "gamma_Q <= gamma_F(ell=6) + 1e-5 <= gamma_S + 2e-5 and rate ordering on "
     << tested << " random stable tunings";
  report(7, ok && timer.seconds() < 300.0, os.str(), timer.seconds());
}

// 8. Optimal asymptotic iteration-complexity scaling.
void criterion8() {
  Timer timer;
  const NoiseModel noise{1.0, 1};
  const double rho0 = 1.0 - 1e-4;
  const double gd_lim =
      std::pow(gd_rho(rho0, 1.0, 10.0).gamma(noise), 2) * (-1.0 / std::log(rho0));
  const double rhb_lim =
      std::pow(rhb(rho0, 1.0, 10.0).gamma(noise), 2) * (-1.0 / std::log(rho0));
  double slopes[2];
  int si = 0;
  for (bool use_rhb : {false, true}) {
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k <= 80; ++k) {
      const double rho = 1.0 - std::pow(10.0, -2.0 - 2.0 * k / 80.0);
      const double g = use_rhb ? rhb(rho, 1.0, 10.0).gamma(noise)
                               : gd_rho(rho, 1.0, 10.0).gamma(noise);
      pts.emplace_back(-1.0 / std::log(rho), g * g);
    }
    slopes[si++] = fit_loglog_slope(pts);
  }
  const bool ok = std::abs(gd_lim - 0.5) <= 0.005 && std::abs(rhb_lim - 0.25) <= 0.0025 &&
                  std::abs(slopes[0] + 1.0) <= 0.05 && std::abs(slopes[1] + 1.0) <= 0.05;
  std::ostringstream os;
  os << "gamma^2 * (-1/log rho) at rho=1-1e-4: GD " << gd_lim << " (1/2), RHB "
     << rhb_lim << " (1/4); log-log slopes " << slopes[0] << ", " << slopes[1]
     << " (-1 +- 0.05)";
  report(8, ok, os.str(), timer.seconds());
}

// 9. Simulation against the exact theory for RHB(0.8).
void criterion9() {
  Timer timer;
  const double rho = 0.8;
  const auto d = rhb(rho, 1.0, 10.0);
  const NoiseModel noise{1.0, 1};
  QuadraticProblem prob =
      make_quadratic(Matrix::Identity(1, 1), Vector::Zero(1), 1.0, 10.0);
  SimConfig cfg;
  cfg.T = 200000;
  cfg.trials = 50;
  cfg.seed = 2024;
  const auto stats = simulate(to_state_space(d.params), prob, noise, cfg);
  const auto ss = steady_state_rms(stats);
  const double gamma_ref = d.gamma(noise);

  SimConfig quiet;
  quiet.T = 300;
  quiet.trials = 1;
  quiet.init = Vector::Constant(1, 1.0);
  const auto decay = simulate(to_state_space(d.params), prob, {0.0, 1}, quiet);
  const double slope = fit_log_decay(decay, 20, 250);
  const bool ok = std::abs(ss.rms - gamma_ref) <= 0.05 * gamma_ref &&
                  std::abs(slope - std::log(rho)) <= 0.02;
  std::ostringstream os;
  os << "RHB(0.8) on (1/2)||y||^2: steady-state rms " << ss.rms << " vs gamma "
     << gamma_ref << " (+-5%), noise-free decay slope " << slope << " vs log(0.8) = "
     << std::log(rho) << " (+-0.02)";
  report(9, ok && timer.seconds() < 60.0, os.str(), timer.seconds());
}

// 10. Full-size sweeps are documented as out of desk scale.
void criterion10() {
  Timer timer;
  std::ifstream readme(FOMCERT_README_PATH);
  std::stringstream ss;
  ss << readme.rdbuf();
  const std::string text = ss.str();
  const bool documented = text.find("500x201x200") != std::string::npos &&
                          text.find("multi-hour") != std::string::npos;
  std::ostringstream os;
  os << "full-size sweeps (500x201x200) are not desk-reproducible; reduced-scale "
        "criterion 6 substitutes and the README documents the scaling: "
     << (documented ? "yes" : "no");
  report(10, documented, os.str(), timer.seconds());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
