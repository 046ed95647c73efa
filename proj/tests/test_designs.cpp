#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fomcert/designs.hpp"
#include "fomcert/quadratic.hpp"
#include "fomcert/sector.hpp"
#include "fomcert/smooth.hpp"

using namespace fomcert;
using Catch::Approx;

TEST_CASE("RHB", "[designs]") {
  const double m = 1.0, L = 10.0;
  SECTION("minimal rate recovers the HB tuning") {
    const auto d = rhb(rhb_min_rate(m, L), m, L);
    const auto hb = standard_tuning(Tuning::HB, m, L);
    REQUIRE(d.params.alpha == Approx(hb.alpha).margin(1e-12));
    REQUIRE(d.params.beta == Approx(hb.beta).margin(1e-12));
    REQUIRE(d.params.eta == 0.0);
  }
  SECTION("sensitivity vanishes as the rate approaches one") {
    REQUIRE(rhb(1.0 - 1e-9, m, L).gamma({1.0, 1}) < 1e-4);
  }
  SECTION("closed form matches the exact quadratic sensitivity") {
    const NoiseModel noise{1.0, 1};
    const auto d = rhb(0.6, m, L);
    REQUIRE(d.gamma(noise) == Approx(0.36443).margin(5e-6));
    REQUIRE(d.gamma(noise) ==
            Approx(quad_sensitivity(d.params, m, L, noise)).margin(1e-10));
    for (double rho = rhb_min_rate(m, L) + 0.001; rho < 1.0; rho += 0.037) {
      const auto di = rhb(rho, m, L);
      REQUIRE(quad_rate(di.params, m, L) == Approx(rho).margin(1e-12));
      REQUIRE(di.gamma(noise) ==
              Approx(quad_sensitivity(di.params, m, L, noise)).margin(1e-10));
    }
  }
  SECTION("rate range enforced") {
    REQUIRE_THROWS_AS(rhb(0.3, m, L), std::domain_error);
    REQUIRE_THROWS_AS(rhb(1.0, m, L), std::domain_error);
  }
}

TEST_CASE("GD(rho)", "[designs]") {
  const double m = 1.0, L = 10.0;
  SECTION("minimal rate is the midpoint stepsize") {
    const auto d = gd_rho(gd_min_rate(m, L), m, L);
    REQUIRE(d.params.alpha == Approx(2.0 / (L + m)).margin(1e-15));
  }
  SECTION("closed-form sensitivity and LMI tightness") {
    const NoiseModel noise{1.0, 1};
    const auto d = gd_rho(0.9, m, L);
    REQUIRE(d.gamma(noise) == Approx(0.22942).margin(5e-6));
    REQUIRE(sector_gamma(to_state_space(d.params), m, L, noise).gamma ==
            Approx(d.gamma(noise)).margin(1e-4));
  }
}

TEST_CASE("RGD", "[designs]") {
  SECTION("smallest alpha recovers GD in disguise") {
    const double rho = 0.9, m = 1.0, L = 2.0;
    const auto p = rgd(rho, m, L, (1.0 - rho) * (1.0 - rho) / m);
    REQUIRE(p.beta == Approx(rho));
    REQUIRE(p.eta == Approx(rho / (1.0 - rho)));
    // equivalent to GD with stepsize (1-rho)/m via the degenerate family
    const auto eq = gd_equivalent_family((1.0 - rho) / m, rho);
    REQUIRE(p.alpha == Approx(eq.alpha).margin(1e-15));
    REQUIRE(p.eta == Approx(eq.eta).margin(1e-12));
  }
  SECTION("published tuning at rho = 0.9, m = 1, L = 2") {
    // rounding of the published five-digit alpha propagates into beta and eta
    const auto p = rgd(0.9, 1.0, 2.0, 0.022382);
    REQUIRE(p.beta == Approx(0.713410).margin(5e-5));
    REQUIRE(p.eta == Approx(0.663514).margin(5e-4));
  }
  SECTION("certified rate equals the design rate across the alpha range") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double L : {2.0, 10.0}) {
      for (int i = 0; i < 10; ++i) {
        const double m = 1.0;
        const double rho = gd_min_rate(m, L) + (0.99 - gd_min_rate(m, L)) * u(rng);
        const auto ar = rgd_alpha_range(rho, m);
        const double alpha = ar.lo + (ar.hi - ar.lo) * u(rng);
        const auto p = rgd(rho, m, L, alpha);
        const auto rate = sector_rate(to_state_space(p), m, L);
        REQUIRE(rate.rho == Approx(rho).margin(2e-6));
      }
    }
  }
  SECTION("alpha outside the admissible interval is rejected") {
    REQUIRE_THROWS_AS(rgd(0.9, 1.0, 2.0, 0.5), std::domain_error);
    REQUIRE_THROWS_AS(rgd(0.9, 2.0, 2.0, 0.01), std::domain_error);
  }
}

TEST_CASE("RGD line-search optimization", "[designs]") {
  const double m = 1.0, L = 2.0, rho = 0.9;
  const NoiseModel noise{1.0, 1};
  const auto opt = rgd_optimize(rho, m, L, noise);
  SECTION("reproduces the published optimum") {
    REQUIRE(opt.gamma == Approx(0.1981).margin(1e-3));
    REQUIRE(opt.alpha == Approx(0.02238).margin(5e-4));
  }
  SECTION("strictly better than GD at the same rate") {
    REQUIRE(opt.gamma < gd_rho(rho, m, L).gamma(noise));
  }
  SECTION("no worse than GD at the boundary rate") {
    const double rho0 = gd_min_rate(m, L);
    const auto b = rgd_optimize(rho0, m, L, noise);
    REQUIRE(b.gamma <= gd_rho(rho0, m, L).gamma(noise) + 1e-6);
  }
}

TEST_CASE("RAM", "[designs]") {
  SECTION("published tuning at rho = 0.9, m = 1, L = 2") {
    const auto p = ram(0.9, 1.0, 2.0);
    REQUIRE(p.alpha == Approx(0.019).margin(1e-12));
    REQUIRE(p.beta == Approx(0.66).margin(1e-12));
    REQUIRE(p.eta == Approx(-3.631579).margin(1e-6));
  }
  SECTION("minimal rate reduces to TM") {
    for (double L : {10.0, 100.0}) {
      const auto p = ram(ram_min_rate(1.0, L), 1.0, L);
      const auto tm = standard_tuning(Tuning::TM, 1.0, L);
      REQUIRE(p.alpha == Approx(tm.alpha).margin(1e-12));
      REQUIRE(p.beta == Approx(tm.beta).margin(1e-12));
      REQUIRE(p.eta == Approx(tm.eta).margin(1e-12));
    }
  }
  SECTION("closed-loop spectral radius at q = m is exactly rho") {
    const double rho = 0.85, m = 1.0, L = 10.0;
    const StateSpace s = to_state_space(ram(rho, m, L));
    REQUIRE(spectral_radius(s.A + m * s.B * s.C) == Approx(rho).margin(1e-10));
  }
  SECTION("certified smooth rate matches the design rate") {
    for (double L : {10.0, 100.0}) {
      for (double frac : {0.15, 0.5, 0.85}) {
        const double lo = ram_min_rate(1.0, L);
        const double rho = lo + (0.995 - lo) * frac;
        const StateSpace s = to_state_space(ram(rho, 1.0, L));
        SmoothOptions opts;
        opts.ell = 1;
        REQUIRE(smooth_rate(s, 1.0, L, opts).rho == Approx(rho).margin(1e-4));
      }
    }
  }
}

TEST_CASE("RAM certificate matrix", "[designs]") {
  SECTION("positive definite across the rate range") {
    for (double L : {2.0, 10.0, 100.0}) {
      const double lo = ram_min_rate(1.0, L);
      for (int k = 1; k <= 10; ++k) {
        const double rho = lo + (0.999 - lo) * k / 10.0;
        REQUIRE(min_eigenvalue(ram_certificate_Q(rho, 1.0, L)) > 0.0);
      }
    }
  }
  SECTION("degenerate denominator rejected") {
    // at the minimum rate m = L(1-rho)^2 and the prefactor blows up
    const double L = 10.0;
    REQUIRE_THROWS_AS(ram_certificate_Q(ram_min_rate(1.0, L), 1.0, L),
                      std::domain_error);
  }
}
