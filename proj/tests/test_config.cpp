#include <string>

#include "doctest.h"
#include "hjnet/config.hpp"

using namespace hjnet;

namespace {

const char* kMinimal = R"({
  "network": {"branches": 2, "length": 1.0},
  "hamiltonians": {"key": "quadratic", "params": [0.5, 0, 0]},
  "boundary": {"type": "kirchhoff", "B": 0},
  "initial": {"key": "abs", "params": [1]},
  "T": 0.5,
  "dx": 0.01
})";

std::string first_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors().front();
  }
  return "";
}

bool mentions(const std::string& text, const std::string& what) {
  return first_error(text).find(what) != std::string::npos;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal config") {
    const auto c = parse_config(kMinimal);
    CHECK(c.spec.network.branches() == 2);
    CHECK(c.spec.network.lengths[1] == 1.0);
    CHECK(c.spec.hamiltonians.size() == 1);
    CHECK(c.spec.boundary.kind == BoundarySpec::Kind::kirchhoff);
    CHECK(c.spec.initial.key == "abs");
    CHECK(c.spec.T == 0.5);
    CHECK(c.spec.dx_ladder == std::vector<double>{0.01});
    CHECK_FALSE(c.kind);
  }

  TEST_CASE("cfl out of range") {
    CHECK(first_error(R"({"solver": {"cfl": 1.5}})") == "solver.cfl: cfl must lie in (0,1]");
    CHECK(mentions(R"({"solver": {"cfl": 0}})", "cfl must lie in (0,1]"));
  }

  TEST_CASE("misspelled keys name their path") {
    CHECK(first_error(R"({"viscous": {"epsilonn": 0.1}})") == "viscous.epsilonn: unknown key");
    CHECK(first_error(R"({"epsilonn": 0.1})") == "epsilonn: unknown key");
    std::vector<std::string> warnings;
    const auto c = parse_config(R"({"viscous": {"epsilonn": 0.1}})", false, &warnings);
    CHECK(warnings.size() == 1);
    CHECK(c.spec.epsilon == 0.1);  // default kept
  }

  TEST_CASE("type mismatches and constraints") {
    CHECK(mentions(R"({"T": "long"})", "T: expected a number"));
    CHECK(mentions(R"({"T": -1})", "T: final time must be positive"));
    CHECK(mentions(R"({"dx": [0.01, 0.02]})", "strictly decreasing"));
    CHECK(mentions(R"({"dx": 0.6})", "dx:"));
    CHECK(mentions(R"({"seeds": -2})", "seeds: expected a nonnegative integer"));
    CHECK(mentions(R"({"hamiltonians": [{"key": "cubic"}]})", "hamiltonians[0]: unknown hamiltonian"));
    CHECK(mentions(R"({"hamiltonians": [{"key": "quadratic", "params": [1,0,0]},
                                        {"key": "quadratic", "params": [1,0,0]},
                                        {"key": "quadratic", "params": [1,0,0]}]})",
                   "hamiltonians: expected 1 or 2 entries"));
    CHECK(mentions(R"({"initial": {"key": "bump", "params": [1]}})", "initial:"));
    CHECK(mentions(R"({"network": {"far_bc": "open"}})", "network.far_bc"));
    CHECK(mentions(R"({"viscous": {"eps_list": [0.1, 0.2]}})", "viscous.eps_list"));
    CHECK(mentions(R"({"comparison": {"solvers": ["implicit"]}})", "comparison.solvers[0]"));
    CHECK(mentions(R"({"kind": "plot"})", "kind: unknown experiment kind"));
    CHECK(mentions("{not json", "invalid JSON"));
    CHECK(mentions("[1, 2]", "<root>: expected an object"));
  }

  TEST_CASE("flux limiter checked against A0 at parse time") {
    const std::string base = R"({"hamiltonians": {"key": "quadratic", "params": [1, 0, 0.5]},
                                 "boundary": {"type": "flux_limiter", "A": )";
    CHECK(mentions(base + "0.2}}", "boundary.A: A=0.2 is below A0=0.5"));
    CHECK_NOTHROW(parse_config(base + "0.7}}"));
    const auto a0 = parse_config(base + "\"A0\"}}");
    CHECK(a0.spec.boundary.at_a0);
    CHECK(mentions(R"({"hamiltonians": {"key": "double_well"},
                       "boundary": {"type": "flux_limiter", "A": 1}})",
                   "boundary: a flux limiter needs convex"));
    CHECK(mentions(R"({"boundary": {"type": "kirchhoff", "A": 1}})", "boundary.A"));
  }

  TEST_CASE("all errors are collected") {
    try {
      parse_config(R"({"T": -1, "solver": {"cfl": 2}, "bogus": 1})");
      FAIL("expected errors");
    } catch (const ConfigError& e) {
      CHECK(e.errors().size() == 3);
    }
  }

  TEST_CASE("parse of serialize is the identity") {
    const char* rich = R"({
      "kind": "equivalence",
      "network": {"lengths": [1.0, 1.5, 0.75], "far_bc": ["frozen", "extrapolate", "frozen"]},
      "hamiltonians": [{"key": "quadratic", "params": [0.5, 0.1, 0]},
                       {"key": "absolute", "params": [1, 0, 0.2]},
                       {"key": "quadratic", "params": [2, -0.3, 0.1]}],
      "boundary": {"type": "flux_limiter", "A": 1.25},
      "initial": {"key": "bump", "params": [0.25, 0.5, 0.25]},
      "T": 0.3,
      "dx": [0.05, 0.025, 0.0125],
      "seed": 18446744073709551615,
      "seeds": 4,
      "solver": {"flux": "godunov", "cfl": 0.9, "alpha": 3.5, "dt": 0.001, "snapshot_stride": 3},
      "viscous": {"epsilon": 0.07, "eps_list": [0.3, 0.1]},
      "comparison": {"solvers": ["viscous"], "branch_counts": [2, 4], "bump_height": 0.1},
      "evaluation": {"radius": 0.5, "stencil": 3, "density": 21},
      "lemma": {"branch_counts": [2], "instances": 9, "budget": 50, "density": 31},
      "tolerances": {"comparison": 1e-11, "viscosity_final": 0.1},
      "output": "results/eq"
    })";
    for (const char* text : {kMinimal, rich, "{}"}) {
      const auto c = parse_config(text);
      const auto again = parse_config(serialize(c));
      CHECK(again == c);
      CHECK(serialize(again) == serialize(c));
    }
    const auto c = parse_config(rich);
    CHECK(c.spec.seed == 18446744073709551615ull);
    CHECK(c.spec.solver.flux == FluxKind::godunov);
    CHECK(c.output == "results/eq");
  }
}
