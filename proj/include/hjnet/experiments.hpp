#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hjnet/csv.hpp"
#include "hjnet/evolve.hpp"
#include "hjnet/lemma_lab.hpp"
#include "hjnet/viscous.hpp"

namespace hjnet {

enum class ExperimentKind { comparison, wholeline, viscosity, equivalence, lemma_suite, lemma_adversarial };

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(const std::string& text);

/// A catalog key with its parameter list ("quadratic" [a, b, c], "bump" [h, c, w], ...).
struct CatalogEntry {
  std::string key;
  std::vector<double> params;

  bool operator==(const CatalogEntry&) const = default;
};

struct BoundarySpec {
  enum class Kind { kirchhoff, flux_limiter };
  Kind kind = Kind::kirchhoff;
  double value = 0.0;  // B for Kirchhoff, A for the flux limiter
  bool at_a0 = false;  // flux limiter A = A0 of the configured hamiltonians

  bool operator==(const BoundarySpec&) const = default;
};

struct Tolerances {
  double comparison = 1e-10;
  double wholeline_error = 0.02;
  double halving_ratio = 0.8;
  double viscosity_final = 0.05;
  double equivalence_final = 0.05;
  double lemma = 1e-9;
  double adversarial = 1e-6;

  bool operator==(const Tolerances&) const = default;
};

struct LemmaSettings {
  std::vector<std::size_t> branch_counts{1, 2, 3, 5};
  std::size_t instances = 200;
  std::size_t budget = 1000;
  std::size_t density = 0;  // 0: lemma::default_density(K)

  bool operator==(const LemmaSettings&) const = default;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::comparison;
  JunctionNetwork network = JunctionNetwork::uniform(2, 1.0);
  std::vector<CatalogEntry> hamiltonians{{"quadratic", {0.5, 0.0, 0.0}}};
  BoundarySpec boundary;
  CatalogEntry initial{"abs", {1.0}};
  double T = 0.5;
  std::vector<double> dx_ladder{0.01};
  std::uint64_t seed = 1;
  std::size_t seeds = 20;

  // comparison
  std::vector<std::string> solvers{"kirchhoff", "flux_limiter", "viscous"};
  std::vector<std::size_t> branch_counts;  // empty: the configured network only
  double bump_height = 0.5;

  // viscous runs and sweeps
  double epsilon = 0.1;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};

  std::optional<double> eval_radius;  // distances only over |x| <= radius
  SolveConfig solver;
  ResidualOptions residual;
  LemmaSettings lemma;
  Tolerances tol;

  bool operator==(const ExperimentSpec& o) const;
};

/// One H per branch; a single entry is broadcast to every branch.
std::vector<HamiltonianSpec> resolve_hamiltonians(const ExperimentSpec& spec, std::size_t K);

/// Initial-data profile as a function of the distance s >= 0 from the junction.
std::function<double(double)> distance_profile(const CatalogEntry& entry);

/// Samples the initial data on `grid`. "random" draws a Lipschitz profile from `seed`.
GridFunction make_initial(const CatalogEntry& entry, const Grid& grid, std::uint64_t seed);

/// Random Lipschitz data (per-branch sine sums sharing the junction value).
GridFunction random_lipschitz(const Grid& grid, std::uint64_t seed);
/// Nonnegative random bump with peak at most `height`.
GridFunction random_bump(const Grid& grid, std::uint64_t seed, double height);

/// max over stored snapshots of max(u - v), minus the same quantity at t = 0.
double comparison_violation(const Trajectory& u, const Trajectory& v);

/// Hopf-Lax value min_z u0(z) + t L((y - z)/t) on a z-grid of spacing h centred on y,
/// over |y - z| <= speed * t.
double hopf_lax(const std::function<double(double)>& u0, const std::function<double(double)>& L,
                double y, double t, double h, double speed);

/// Each driver fills `pass` with the verdict against the tolerances in `tol` and
/// echoes the experiment settings into the table metadata.
struct ExperimentResult {
  ResultTable table;
  bool pass = true;
  std::string diagnostic;
};

ExperimentResult run_comparison(const ExperimentSpec& spec);
ExperimentResult run_wholeline(const ExperimentSpec& spec);
ExperimentResult run_equivalence(const ExperimentSpec& spec);
ExperimentResult run_viscosity(const ExperimentSpec& spec);
ExperimentResult run_lemma_suite(const ExperimentSpec& spec);
ExperimentResult run_lemma_adversarial(const ExperimentSpec& spec);

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Writes table + sidecar; errors name the path.
void write_result(const ResultTable& table, const std::filesystem::path& path);

}  // namespace hjnet
