#include <cmath>

#include "doctest.h"
#include "hjnet/detail/random.hpp"
#include "hjnet/network.hpp"

using namespace hjnet;

namespace {

GridFunction random_function(const Grid& g, std::uint64_t seed) {
  detail::Rng rng(seed);
  GridFunction u = GridFunction::zeros(g);
  u.junction = rng.uniform(-1, 1);
  for (auto& b : u.values)
    for (auto& v : b) v = rng.uniform(-1, 1);
  return u;
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("grid node counts follow length / dx") {
    const Grid g = build_grid(JunctionNetwork::with_lengths({1.0, 0.5, 2.0}), 0.01);
    CHECK(g.branches() == 3);
    CHECK(g.nodes(0) == 100);
    CHECK(g.nodes(1) == 50);
    CHECK(g.nodes(2) == 200);
    CHECK(g.total_nodes() == 351);
    CHECK(g.coordinate(3) == doctest::Approx(-0.03));
  }

  TEST_CASE("bad grids are rejected") {
    CHECK_THROWS_AS(build_grid(JunctionNetwork::uniform(2, 1.0), 0.0), PreconditionError);
    CHECK_THROWS_AS(build_grid(JunctionNetwork::uniform(2, 1.0), -0.1), PreconditionError);
    CHECK_THROWS_AS(build_grid(JunctionNetwork::uniform(2, 1.0), 0.5), PreconditionError);
    CHECK_THROWS_AS(build_grid(JunctionNetwork::uniform(0, 1.0), 0.1), PreconditionError);
    CHECK_THROWS_AS(build_grid(JunctionNetwork::with_lengths({1.0, -1.0}), 0.1),
                    PreconditionError);
  }

  TEST_CASE("initial data must be continuous at the junction") {
    const Grid g = build_grid(JunctionNetwork::uniform(2, 1.0), 0.1);
    std::vector<BranchProfile> ok{[](double x) { return 1.0 + x; }, [](double x) { return 1.0 - x; }};
    const auto u = sample_initial(g, ok);
    CHECK(u.junction == 1.0);
    CHECK(u.at(0, 2) == doctest::Approx(0.8));
    CHECK(u.at(1, 2) == doctest::Approx(1.2));
    std::vector<BranchProfile> jump{[](double) { return 0.0; }, [](double) { return 1e-6; }};
    CHECK_THROWS_AS(sample_initial(g, jump), PreconditionError);
  }

  TEST_CASE("sup distance is a metric") {
    const Grid g = build_grid(JunctionNetwork::uniform(3, 1.0), 0.05);
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto u = random_function(g, 3 * s), v = random_function(g, 3 * s + 1),
                 w = random_function(g, 3 * s + 2);
      CHECK(sup_distance(u, u) == 0.0);
      CHECK(sup_distance(u, v) == sup_distance(v, u));
      CHECK(sup_distance(u, w) <= sup_distance(u, v) + sup_distance(v, w) + 1e-15);
      CHECK(sup_distance(u, v) > 0.0);
    }
  }

  TEST_CASE("restricted distance ignores far nodes") {
    const Grid g = build_grid(JunctionNetwork::uniform(2, 1.0), 0.1);
    auto u = GridFunction::zeros(g);
    auto v = u;
    v.values[1][9] = 5.0;  // x = -1.0
    v.values[0][1] = 0.5;  // x = -0.2
    CHECK(sup_distance(u, v) == 5.0);
    CHECK(sup_distance(u, v, g, 0.5) == 0.5);
    CHECK(sup_distance(u, v, g, 0.15) == 0.0);
  }

  TEST_CASE("max difference and constants") {
    const Grid g = build_grid(JunctionNetwork::uniform(2, 1.0), 0.1);
    const auto u = GridFunction::constant(g, 2.0);
    const auto v = u + 0.25;
    CHECK(max_difference(v, u) == 0.25);
    CHECK(max_difference(u, v) == -0.25);
    CHECK_THROWS_AS(sup_distance(u, GridFunction::zeros(build_grid(JunctionNetwork::uniform(3, 1.0), 0.1))),
                    PreconditionError);
  }

  TEST_CASE("discrete lipschitz of |x| is one") {
    const Grid g = build_grid(JunctionNetwork::uniform(2, 1.0), 0.01);
    const auto u = sample_initial(g, [](double x) { return std::abs(x); });
    CHECK(discrete_lipschitz(u, g.dx()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(discrete_lipschitz(GridFunction::constant(g, 3.0), g.dx()) == 0.0);
  }
}
