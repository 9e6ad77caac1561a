#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "hjnet/detail/random.hpp"
#include "hjnet/fluxes.hpp"
#include "hjnet/network.hpp"
#include "oracles.hpp"

using namespace hjnet;

TEST_SUITE("fluxes") {
  TEST_CASE("consistency: flux(p, p) = H(p)") {
    detail::Rng rng(1);
    for (int k = 0; k < 200; ++k) {
      const auto h = catalog::quadratic(rng.uniform(0.1, 2), rng.uniform(-1, 1), rng.uniform(-1, 1));
      const double p = rng.uniform(-3, 3);
      CHECK(lf_flux(h, 2.0, p, p, 0, 0) == h(p));
      CHECK(godunov_flux(split_flux_limiter(h), p, p) == h(p));
    }
  }

  TEST_CASE("half-square examples") {
    const auto h = catalog::quadratic(0.5, 0, 0);
    CHECK(lf_flux(h, 1.0, -1.0, 1.0, 0, 0) == doctest::Approx(-1.0));
    const auto s = split_flux_limiter(h);
    CHECK(godunov_flux(s, -1.0, 1.0) == 0.0);   // expansion: min over [-1, 1]
    CHECK(godunov_flux(s, 1.0, -1.0) == 0.5);   // shock: max over [-1, 1]
    CHECK(godunov_flux(s, 0.5, 2.0) == 0.125);
  }

  TEST_CASE("godunov equals the brute-force minimax oracle") {
    detail::Rng rng(77);
    for (int k = 0; k < 10000; ++k) {
      const HamiltonianSpec h =
          k % 3 == 0 ? catalog::absolute(rng.uniform(0.2, 3), rng.uniform(-2, 2), rng.uniform(-1, 1))
                     : catalog::quadratic(rng.uniform(0.1, 3), rng.uniform(-2, 2), rng.uniform(-1, 1));
      const double pm = rng.uniform(-4, 4), pp = rng.uniform(-4, 4);
      const double expect = oracle::godunov_minimax([&](double p) { return h(p); }, pm, pp);
      REQUIRE(std::abs(godunov_flux(split_flux_limiter(h), pm, pp) - expect) <= 1e-9);
    }
  }

  TEST_CASE("monotone: nondecreasing in p-, nonincreasing in p+") {
    detail::Rng rng(9);
    const double bound = 3.0;
    for (int k = 0; k < 2000; ++k) {
      const auto h = catalog::quadratic(rng.uniform(0.1, 2), rng.uniform(-1, 1), 0);
      const double alpha = h.lipschitz_p({-bound, bound});
      const auto lf = NumericalFlux::lax_friedrichs(h, alpha);
      const auto gd = NumericalFlux::godunov(h, alpha);
      const double pm = rng.uniform(-bound, bound), pp = rng.uniform(-bound, bound);
      const double d = rng.uniform(0, bound - std::max(pm, pp));
      for (const auto& f : {lf, gd}) {
        CHECK(f(pm + d, pp, 0, 0) >= f(pm, pp, 0, 0) - 1e-13);
        CHECK(f(pm, pp + d, 0, 0) <= f(pm, pp, 0, 0) + 1e-13);
      }
    }
  }

  TEST_CASE("LF with alpha = 0 is not monotone") {
    const auto h = catalog::quadratic(0.5, 0, 0);
    const auto f = NumericalFlux::lax_friedrichs(h, 0.0);
    CHECK(f(1.0, 1.0, 0, 0) > f(1.0, 0.5, 0, 0));  // increasing in p+
  }

  TEST_CASE("cfl step") {
    CHECK(cfl_dt(2.0, 0.01, 0.5) == doctest::Approx(0.0025));
    CHECK_THROWS_WITH_AS(cfl_dt(1.0, 0.01, 1.5), "cfl must lie in (0,1]", PreconditionError);
    CHECK_THROWS_AS(cfl_dt(1.0, 0.01, 0.0), PreconditionError);
    CHECK_THROWS_AS(cfl_dt(0.0, 0.01, 0.5), PreconditionError);
  }

  TEST_CASE("for_range picks alpha from the slope range") {
    const auto h = catalog::quadratic(1.0, 0.0, 0.0);
    const auto f = NumericalFlux::for_range(FluxKind::lax_friedrichs, h, 2.0);
    CHECK(f.speed() == doctest::Approx(4.0));
    CHECK(f.kind() == FluxKind::lax_friedrichs);
    CHECK_THROWS_AS(NumericalFlux::godunov(catalog::double_well(), 1.0), PreconditionError);
    CHECK_THROWS_AS(NumericalFlux::lax_friedrichs(h, -1.0), PreconditionError);
  }
}
