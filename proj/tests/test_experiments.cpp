#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hjnet/config.hpp"
#include "hjnet/experiments.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace hjnet;

namespace {

ExperimentSpec line_spec() {
  ExperimentSpec s;
  s.kind = ExperimentKind::wholeline;
  s.network = JunctionNetwork::uniform(2, 2.0, FarBoundary::extrapolate);
  s.hamiltonians = {{"quadratic", {0.5, 0.0, 0.0}}};
  s.initial = {"abs", {1.0}};
  s.T = 0.5;
  s.dx_ladder = {0.04, 0.02};
  s.eval_radius = 1.0;
  return s;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("Hopf-Lax minimisation reproduces the closed form") {
    const auto L = [](double v) { return 0.5 * v * v; };
    const auto u0 = [](double y) { return std::abs(y); };
    for (double y = -1.0; y <= 1.0; y += 0.0625)
      CHECK(std::abs(hopf_lax(u0, L, y, 0.5, 1e-4, 1.5) - oracle::hopf_lax_abs(y, 0.5)) <= 1e-8);
    CHECK(hopf_lax(u0, L, 0.3, 0.0, 1e-3, 1.0) == 0.3);
  }

  TEST_CASE("whole-line errors shrink and vanish for zero data") {
    auto s = line_spec();
    const auto r = run_wholeline(s);
    REQUIRE(r.table.rows.size() == 2);
    CHECK(r.table.number(1, "linf_error") < r.table.number(0, "linf_error"));
    CHECK(r.table.number(1, "ratio") < 0.8);

    s.initial = {"zero", {}};
    const auto z = run_wholeline(s);
    CHECK(z.pass);
    for (std::size_t k = 0; k < z.table.rows.size(); ++k) CHECK(z.table.number(k, "linf_error") == 0.0);
  }

  TEST_CASE("whole-line preconditions") {
    auto s = line_spec();
    s.hamiltonians = {{"double_well", {}}};
    CHECK_THROWS_AS(run_wholeline(s), PreconditionError);
    s = line_spec();
    s.network = JunctionNetwork::uniform(3, 2.0);
    CHECK_THROWS_AS(run_wholeline(s), PreconditionError);
    s = line_spec();
    s.boundary.value = 1.0;
    CHECK_THROWS_AS(run_wholeline(s), PreconditionError);
    s = line_spec();
    s.hamiltonians = {{"quadratic", {0.5, 0.3, 0.0}}};
    CHECK_THROWS_AS(run_wholeline(s), PreconditionError);
  }

  TEST_CASE("comparison: ordered pairs and the degenerate pair") {
    ExperimentSpec s;
    s.network = JunctionNetwork::uniform(2, 1.0, FarBoundary::extrapolate);
    s.initial = {"random", {}};
    s.dx_ladder = {0.02};
    s.seeds = 3;
    s.T = 0.3;
    s.branch_counts = {2, 3};
    const auto r = run_comparison(s);
    CHECK(r.pass);
    CHECK(r.table.rows.size() == 2 * 3 * 3);
    for (std::size_t k = 0; k < r.table.rows.size(); ++k) CHECK(r.table.number(k, "violation") <= 1e-10);

    s.bump_height = 0.0;
    const auto d = run_comparison(s);
    for (std::size_t k = 0; k < d.table.rows.size(); ++k) CHECK(d.table.number(k, "violation") == 0.0);
  }

  TEST_CASE("identical specs give byte-identical tables") {
    ExperimentSpec s;
    s.network = JunctionNetwork::uniform(2, 1.0, FarBoundary::extrapolate);
    s.initial = {"random", {}};
    s.dx_ladder = {0.05};
    s.seeds = 2;
    s.T = 0.2;
    CHECK(to_csv(run_comparison(s).table) == to_csv(run_comparison(s).table));
  }

  TEST_CASE("comparison aborts name the seed") {
    ExperimentSpec s;
    s.network = JunctionNetwork::uniform(2, 1.0, FarBoundary::extrapolate);
    s.initial = {"random", {}};
    s.dx_ladder = {0.005};
    s.seeds = 1;
    s.seed = 1;
    s.solvers = {"kirchhoff"};
    s.solver.alpha = 0.0;
    try {
      run_comparison(s);
      FAIL("expected a numeric failure");
    } catch (const NumericFailure& e) {
      CHECK(std::string(e.what()).find("seed 1") != std::string::npos);
    }
  }

  TEST_CASE("equivalence: decreasing distance, A below A0 rejected") {
    ExperimentSpec s;
    s.kind = ExperimentKind::equivalence;
    s.network = JunctionNetwork::uniform(2, 1.5);
    s.boundary = {BoundarySpec::Kind::flux_limiter, 2.0, false};
    s.initial = {"bump", {0.25, 0.5, 0.25}};
    s.dx_ladder = {0.04, 0.02};
    const auto r = run_equivalence(s);
    CHECK(r.table.number(0, "B") == doctest::Approx(-4.0));
    CHECK(r.table.number(1, "sup_distance") < r.table.number(0, "sup_distance"));

    s.boundary = {BoundarySpec::Kind::flux_limiter, 0.0, true};
    s.initial = {"cosine", {0.2, 3.0}};
    const auto a0 = run_equivalence(s);
    CHECK(a0.table.number(1, "sup_distance") < 0.05);

    s.boundary = {BoundarySpec::Kind::flux_limiter, -1.0, false};
    CHECK_THROWS_AS(run_equivalence(s), PreconditionError);
  }

  TEST_CASE("viscosity driver wraps the sweep") {
    auto s = line_spec();
    s.kind = ExperimentKind::viscosity;
    s.dx_ladder = {0.02};
    s.eps_list = {0.2, 0.1};
    const auto r = run_viscosity(s);
    REQUIRE(r.table.rows.size() == 2);
    CHECK(r.table.number(1, "sup_distance") < r.table.number(0, "sup_distance"));
    CHECK(r.table.columns == std::vector<std::string>{"epsilon", "dx", "dt", "T", "sup_distance"});
  }

  TEST_CASE("lemma suite and metadata echo") {
    ExperimentSpec s;
    s.kind = ExperimentKind::lemma_suite;
    s.lemma.instances = 8;
    const auto r = run_lemma_suite(s);
    CHECK(r.pass);
    CHECK(r.table.rows.size() == 8);
    for (std::size_t k = 0; k < 8; ++k) CHECK(r.table.number(k, "a_minus_b") <= 1e-9);
    const auto meta = nlohmann::json::parse(r.table.metadata);
    CHECK(meta["kind"] == "lemma_suite");
    CHECK(meta["spec"]["lemma"]["instances"] == 8);
    CHECK(meta.contains("runtime_seconds"));
  }

  TEST_CASE("initial profiles") {
    CHECK(distance_profile({"abs", {2.0}})(0.5) == 1.0);
    CHECK(distance_profile({"bump", {1.0, 0.5, 0.25}})(0.5) == 1.0);
    CHECK(distance_profile({"bump", {1.0, 0.5, 0.25}})(0.0) == 0.0);
    CHECK_THROWS_AS(distance_profile({"abs", {}}), PreconditionError);
    CHECK_THROWS_AS(distance_profile({"spline", {}}), PreconditionError);
    const Grid g = build_grid(JunctionNetwork::uniform(3, 1.0), 0.05);
    const auto a = make_initial({"random", {}}, g, 5);
    CHECK(a == make_initial({"random", {}}, g, 5));
    CHECK_FALSE(a == make_initial({"random", {}}, g, 6));
    const auto b = random_bump(g, 5, 0.5);
    for (const auto& br : b.values)
      for (double v : br) CHECK(v >= 0.0);
  }

  TEST_CASE("write_result writes table and sidecar") {
    ResultTable t;
    t.columns = {"x"};
    t.add_row({1.0});
    t.metadata = "{}";
    const auto p = std::filesystem::temp_directory_path() / "hjnet_exp_test" / "r.csv";
    write_result(t, p);
    CHECK(std::filesystem::exists(p));
    CHECK(std::filesystem::exists(p.string() + ".meta.json"));
  }
}
