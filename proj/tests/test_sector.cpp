#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fomcert/designs.hpp"
#include "fomcert/quadratic.hpp"
#include "fomcert/sector.hpp"

using namespace fomcert;
using Catch::Approx;

TEST_CASE("GD feasibility fixtures", "[sector]") {
  const double m = 1.0, L = 10.0;
  SECTION("explicit certificate at rho = 0.9, n = 1 realization") {
    const double rho = 0.9;
    StateSpace s;
    s.A = Matrix::Constant(1, 1, 1.0);
    s.B = Matrix::Constant(1, 1, -(1.0 - rho) / m);
    s.C = Matrix::Constant(1, 1, 1.0);
    const auto rep = sector_check_rate(s, m, L, rho,
                                       Matrix::Constant(1, 1, 1.0 / (1.0 - rho * rho)),
                                       rho / (m * (L - m) * (rho + 1.0)), 1e-7);
    REQUIRE(rep.ok);
  }
  SECTION("identically-zero left side at the boundary rate") {
    // The feasible set at the exact critical rate has empty interior (a
    // strict certificate would contradict tightness), so the explicit
    // zero-residual certificate decides the question via the warm start.
    const double rho = (L - m) / (L + m);
    StateSpace s;
    s.A = Matrix::Constant(1, 1, 1.0);
    s.B = Matrix::Constant(1, 1, -2.0 / (L + m));
    s.C = Matrix::Constant(1, 1, 1.0);
    lmi::LmiProblem prob = sector_rate_problem(s, m, L, rho);
    lmi::Assignment cert{Matrix::Constant(1, 1, 1.0 / (1.0 - rho * rho)),
                         Matrix::Constant(1, 1, rho / (m * (L - m) * (rho + 1.0)))};
    lmi::SolveOptions opts;
    opts.warm_start = &cert;
    const auto sol = lmi::solve(prob, opts);
    REQUIRE(sol.status == lmi::SolveStatus::Feasible);
    REQUIRE(sol.max_violation <= opts.feas_tol);
  }
  SECTION("below the exact rate is infeasible") {
    const StateSpace s = to_state_space({2.0 / (L + m), 0.0, 0.0});
    const auto f = sector_rate_feasible(s, m, L, 0.5 * (L - m) / (L + m));
    REQUIRE_FALSE(f.feasible);
  }
}

TEST_CASE("sector rate bisection", "[sector]") {
  const double m = 1.0, L = 10.0;
  SECTION("GD with design rate 0.9") {
    const StateSpace s = to_state_space({0.1, 0.0, 0.0});
    const auto pt = sector_rate(s, m, L);
    REQUIRE(pt.rho == Approx(0.9).margin(2e-6));
    REQUIRE(pt.certificate.parts.count("P") == 1);
  }
  SECTION("stepsize outside (0, 4/L) has no certificate") {
    const StateSpace s = to_state_space({0.5, 0.0, 0.0});
    const auto pt = sector_rate(s, m, L);
    REQUIRE(std::isinf(pt.rho));
  }
}

TEST_CASE("sector sensitivity", "[sector]") {
  const double m = 1.0, L = 10.0;
  const NoiseModel noise{1.0, 1};
  SECTION("GD tightness at rho = 0.9") {
    const double rho = 0.9;
    const StateSpace s = to_state_space({(1.0 - rho) / m, 0.0, 0.0});
    const auto pt = sector_gamma(s, m, L, noise);
    const double expected = std::sqrt((1.0 - rho) / (1.0 + rho)) / m;
    REQUIRE(expected == Approx(0.22942).margin(5e-6));
    REQUIRE(pt.gamma == Approx(expected).margin(1e-4));
  }
  SECTION("zero noise") {
    const StateSpace s = to_state_space({0.1, 0.0, 0.0});
    REQUIRE(sector_gamma(s, m, L, {0.0, 1}).gamma == 0.0);
  }
  SECTION("sensitivity LMI infeasible for a divergent method") {
    const StateSpace s = to_state_space({0.5, 0.0, 0.0});
    REQUIRE_THROWS_AS(sector_gamma(s, m, L, noise), no_certificate_error);
  }
}

TEST_CASE("RGD fixture at m=1, L=2", "[sector]") {
  const double m = 1.0, L = 2.0, rho = 0.9;
  const NoiseModel noise{1.0, 1};
  // the published alpha is rounded to five digits; beta and eta inherit the
  // rounding through d(beta)/d(alpha) ~ 30 and d(eta)/d(alpha) ~ 500
  const AlgorithmParams p = rgd(rho, m, L, 0.022382);
  REQUIRE(p.beta == Approx(0.713410).margin(5e-5));
  REQUIRE(p.eta == Approx(0.663514).margin(5e-4));
  const StateSpace s = to_state_space(p);
  const auto rate = sector_rate(s, m, L, 1e-5);
  REQUIRE(rate.rho == Approx(0.9).margin(1e-4));
  const auto gam = sector_gamma(s, m, L, noise);
  REQUIRE(gam.gamma == Approx(0.1981).margin(1e-3));
}

TEST_CASE("containment: quadratic metrics never exceed sector bounds", "[sector]") {
  const double m = 1.0, L = 10.0;
  const NoiseModel noise{1.0, 1};
  std::mt19937_64 rng(57);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto box = param_bounds(m, L);
  int tested = 0;
  while (tested < 100) {
    AlgorithmParams p;
    p.alpha = box.alpha.lo + (box.alpha.hi - box.alpha.lo) * u(rng);
    const double ae = box.alpha_eta.lo + (box.alpha_eta.hi - box.alpha_eta.lo) * u(rng);
    const auto br = box.beta_range(ae);
    p.beta = br.lo + (br.hi - br.lo) * u(rng);
    p.eta = ae / p.alpha;
    const StateSpace s = to_state_space(p);
    const auto sec_rate = sector_rate(s, m, L);
    if (!(sec_rate.rho < 1.0)) continue;
    ++tested;
    REQUIRE(quad_rate(p, m, L) <= sec_rate.rho + 2e-6);
    REQUIRE(quad_sensitivity(p, m, L, noise) <=
            sector_gamma(s, m, L, noise).gamma + 1e-6);
  }
}

TEST_CASE("GD sector bounds are tight against the Q_{m,m} lower bound", "[sector]") {
  const double m = 1.0, L = 10.0;
  const NoiseModel noise{1.0, 1};
  for (double rho : {0.82, 0.9, 0.99}) {
    const StateSpace s = to_state_space({(1.0 - rho) / m, 0.0, 0.0});
    REQUIRE(sector_rate(s, m, L).rho == Approx(rho).margin(1e-4));
    REQUIRE(sector_gamma(s, m, L, noise).gamma ==
            Approx(std::sqrt((1.0 - rho) / (1.0 + rho)) / m).margin(1e-4));
  }
}

TEST_CASE("feasibility is monotone in the rate", "[sector]") {
  const double m = 1.0, L = 10.0;
  const StateSpace s = to_state_space({0.15, 0.0, 0.0});  // exact rate 0.85
  bool seen_feasible = false;
  for (double rho = 0.3; rho <= 1.21; rho += 0.05) {
    const bool f = sector_rate_feasible(s, m, L, rho).feasible;
    if (seen_feasible) REQUIRE(f);
    seen_feasible = seen_feasible || f;
  }
  REQUIRE(seen_feasible);
}
