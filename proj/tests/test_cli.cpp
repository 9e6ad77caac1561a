#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "hjnet/cli.hpp"
#include "hjnet/csv.hpp"

using namespace hjnet;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "hjnet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / "hjnet_cli_test" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("solve on the constant problem") {
    const auto dir = fresh_dir("constant");
    const auto cfg = write_config(dir, R"({
      "network": {"branches": 3, "length": 1.0},
      "hamiltonians": {"key": "quadratic", "params": [1, 0, 0]},
      "initial": {"key": "constant", "params": [0.7]},
      "T": 0.5, "dx": 0.05, "solver": {"snapshot_stride": 5}})");
    const auto r = run({"solve", "--config", cfg.string(), "--out", (dir / "out").string(), "--quiet"});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    const auto table = parse_csv(slurp(dir / "out" / "trajectory.csv"));
    REQUIRE(table.rows.size() > 0);
    for (std::size_t k = 0; k < table.rows.size(); ++k) CHECK(std::abs(table.number(k, "u") - 0.7) <= 1e-12);
    CHECK(fs::exists(dir / "out" / "trajectory.csv.meta.json"));
  }

  TEST_CASE("viscous and fluxlimiter trajectories") {
    const auto dir = fresh_dir("traj");
    const auto k = write_config(dir, R"({"initial": {"key": "bump", "params": [0.3, 0.4, 0.2]},
      "T": 0.2, "dx": 0.05, "viscous": {"epsilon": 0.05}})");
    CHECK(run({"viscous", "--config", k.string(), "--out", (dir / "v").string(), "--quiet"}).code == 0);
    CHECK(fs::exists(dir / "v" / "trajectory.csv"));
    CHECK(run({"fluxlimiter", "--config", k.string(), "--out", (dir / "f").string()}).code == 2);

    std::ofstream(dir / "fl.json") << R"({"boundary": {"type": "flux_limiter", "A": "A0"},
      "initial": {"key": "bump", "params": [0.3, 0.4, 0.2]}, "T": 0.2, "dx": 0.05})";
    CHECK(run({"fluxlimiter", "--config", (dir / "fl.json").string(), "--out", (dir / "f").string(),
               "--quiet"}).code == 0);
    CHECK(run({"solve", "--config", (dir / "fl.json").string(), "--out", (dir / "s").string()}).code == 2);
  }

  TEST_CASE("non-monotone flux makes compare fail") {
    const auto dir = fresh_dir("alpha0");
    const auto cfg = write_config(dir, R"({
      "network": {"branches": 2, "length": 1.0, "far_bc": "extrapolate"},
      "initial": {"key": "random"}, "T": 0.05, "dx": 0.005, "seeds": 2,
      "comparison": {"solvers": ["kirchhoff"]},
      "solver": {"alpha": 0.0}})");
    const auto r = run({"compare", "--config", cfg.string(), "--out", (dir / "out").string(), "--quiet"});
    CHECK(r.code == 1);
    CHECK(r.err.find("comparison violated") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "comparison.csv"));
  }

  TEST_CASE("config errors exit 2 and write nothing") {
    const auto dir = fresh_dir("bad");
    const auto cfg = write_config(dir, R"({"network": {"far_bc": "extrapolate"}, "dx": 0.05,
                                           "viscous": {"epsilonn": 0.1}})");
    const auto out = dir / "out";
    const auto r = run({"solve", "--config", cfg.string(), "--out", out.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("viscous.epsilonn") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
    CHECK(run({"solve", "--config", cfg.string(), "--out", out.string(), "--no-strict", "--quiet"}).code == 0);
  }

  TEST_CASE("flag and file problems") {
    const auto dir = fresh_dir("flags");
    CHECK(run({"explode", "--config", "x.json"}).code == 2);
    CHECK(run({"solve"}).code == 2);
    CHECK(run({"solve", "--config", (dir / "missing.json").string()}).code == 3);
    const auto cfg = write_config(dir, R"({"kind": "wholeline"})");
    CHECK(run({"solve", "--config", cfg.string(), "--out", (dir / "o").string()}).code == 2);
    CHECK(run({"--help"}).code == 0);
  }

  TEST_CASE("unwritable output directory is an I/O error") {
    const auto dir = fresh_dir("io");
    std::ofstream(dir / "file") << "x";
    const auto cfg = write_config(dir, R"({"T": 0.1, "dx": 0.1})");
    CHECK(run({"solve", "--config", cfg.string(), "--out", (dir / "file" / "sub").string(), "--quiet"})
              .code == 3);
  }

  TEST_CASE("seed override and deterministic output") {
    const auto dir = fresh_dir("seed");
    const auto cfg = write_config(dir, R"({"lemma": {"instances": 4, "branch_counts": [1, 2]}})");
    const auto a = dir / "a", b = dir / "b", c = dir / "c";
    CHECK(run({"lemma-suite", "--config", cfg.string(), "--out", a.string(), "--quiet"}).code == 0);
    CHECK(run({"lemma-suite", "--config", cfg.string(), "--out", b.string(), "--quiet"}).code == 0);
    CHECK(run({"lemma-suite", "--config", cfg.string(), "--out", c.string(), "--seed", "77", "--quiet"})
              .code == 0);
    CHECK(slurp(a / "lemma_suite.csv") == slurp(b / "lemma_suite.csv"));
    CHECK(slurp(a / "lemma_suite.csv") != slurp(c / "lemma_suite.csv"));
  }
}
