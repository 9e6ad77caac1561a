#include "hjnet/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hjnet/config.hpp"
#include "hjnet/detail/random.hpp"
#include "hjnet/detail/parallel.hpp"
#include "json.hpp"

namespace hjnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

JunctionNetwork network_for(const ExperimentSpec& spec, std::size_t K) {
  if (K == spec.network.branches()) return spec.network;
  return JunctionNetwork::uniform(K, spec.network.lengths.front(), spec.network.far_bc.front());
}

std::string describe(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

// Metadata blob shared by every driver.
void finish(ExperimentResult& res, const ExperimentSpec& spec,
            std::chrono::steady_clock::time_point start) {
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::ordered_json meta;
  meta["kind"] = to_string(spec.kind);
  meta["pass"] = res.pass;
  if (!res.diagnostic.empty()) meta["diagnostic"] = res.diagnostic;
  meta["runtime_seconds"] = secs;
  meta["spec"] = nlohmann::ordered_json::parse(spec_json(spec));
  res.table.metadata = meta.dump(2);
}

void fail(ExperimentResult& res, const std::string& why) {
  if (res.pass) res.diagnostic = why;
  res.pass = false;
}

SolveConfig final_only(SolveConfig c) {
  c.snapshot_stride = std::numeric_limits<std::size_t>::max();
  return c;
}

double evaluation_distance(const ExperimentSpec& spec, const Grid& grid, const GridFunction& u,
                           const GridFunction& v) {
  return spec.eval_radius ? sup_distance(u, v, grid, *spec.eval_radius) : sup_distance(u, v);
}

// Decreasing-column check used by the ladder experiments.
bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (!(xs[k] < xs[k - 1])) return false;
  return true;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::comparison: return "comparison";
    case ExperimentKind::wholeline: return "wholeline";
    case ExperimentKind::viscosity: return "viscosity";
    case ExperimentKind::equivalence: return "equivalence";
    case ExperimentKind::lemma_suite: return "lemma_suite";
    case ExperimentKind::lemma_adversarial: return "lemma_adversarial";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(const std::string& text) {
  for (auto k : {ExperimentKind::comparison, ExperimentKind::wholeline, ExperimentKind::viscosity,
                 ExperimentKind::equivalence, ExperimentKind::lemma_suite,
                 ExperimentKind::lemma_adversarial})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

bool ExperimentSpec::operator==(const ExperimentSpec& o) const {
  auto solver_tuple = [](const SolveConfig& c) {
    return std::tuple(c.flux, c.cfl, c.alpha, c.dt, c.snapshot_stride, c.slope_bound);
  };
  return kind == o.kind && network == o.network && hamiltonians == o.hamiltonians &&
         boundary == o.boundary && initial == o.initial && T == o.T &&
         dx_ladder == o.dx_ladder && seed == o.seed && seeds == o.seeds &&
         solvers == o.solvers && branch_counts == o.branch_counts &&
         bump_height == o.bump_height && epsilon == o.epsilon && eps_list == o.eps_list &&
         eval_radius == o.eval_radius && solver_tuple(solver) == solver_tuple(o.solver) &&
         residual.stencil == o.residual.stencil && residual.density == o.residual.density &&
         lemma == o.lemma && tol == o.tol;
}

std::vector<HamiltonianSpec> resolve_hamiltonians(const ExperimentSpec& spec, std::size_t K) {
  if (spec.hamiltonians.size() != 1 && spec.hamiltonians.size() != K) {
    std::ostringstream msg;
    msg << "expected 1 or " << K << " hamiltonians, got " << spec.hamiltonians.size();
    throw PreconditionError(msg.str());
  }
  std::vector<HamiltonianSpec> out;
  for (std::size_t i = 0; i < K; ++i) {
    const auto& e = spec.hamiltonians[spec.hamiltonians.size() == 1 ? 0 : i];
    out.push_back(catalog::make(e.key, e.params));
  }
  return out;
}

std::function<double(double)> distance_profile(const CatalogEntry& entry) {
  const auto& p = entry.params;
  auto need = [&](std::size_t n) {
    if (p.size() != n) {
      std::ostringstream msg;
      msg << "initial profile '" << entry.key << "' takes " << n << " parameters, got "
          << p.size();
      throw PreconditionError(msg.str());
    }
  };
  if (entry.key == "zero") {
    need(0);
    return [](double) { return 0.0; };
  }
  if (entry.key == "constant") {
    need(1);
    return [c = p[0]](double) { return c; };
  }
  if (entry.key == "abs") {
    need(1);
    return [k = p[0]](double s) { return k * s; };
  }
  if (entry.key == "bump") {
    need(3);
    if (!(p[2] > 0.0)) throw PreconditionError("bump width must be positive");
    return [h = p[0], c = p[1], w = p[2]](double s) {
      return h * std::max(0.0, 1.0 - std::abs(s - c) / w);
    };
  }
  if (entry.key == "cosine") {
    need(2);
    return [a = p[0], f = p[1]](double s) { return a * std::cos(f * s); };
  }
  if (entry.key == "random")
    throw PreconditionError("the 'random' profile is seeded per run and has no closed form");
  throw PreconditionError("unknown initial profile '" + entry.key + "'");
}

GridFunction make_initial(const CatalogEntry& entry, const Grid& grid, std::uint64_t seed) {
  if (entry.key == "random") {
    if (!entry.params.empty()) throw PreconditionError("the 'random' profile takes no parameters");
    return random_lipschitz(grid, seed);
  }
  const auto f = distance_profile(entry);
  return sample_initial(grid, [f](double x) { return f(-x); });
}

GridFunction random_lipschitz(const Grid& grid, std::uint64_t seed) {
  detail::Rng rng(seed);
  GridFunction u = GridFunction::zeros(grid);
  u.junction = rng.uniform(-0.5, 0.5);
  for (std::size_t i = 0; i < grid.branches(); ++i) {
    double amp[3], freq[3], phase[3];
    for (int k = 0; k < 3; ++k) {
      amp[k] = rng.uniform(-0.3, 0.3);
      freq[k] = rng.uniform(0.5, 4.0);
      phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    for (std::size_t j = 1; j <= grid.nodes(i); ++j) {
      const double s = static_cast<double>(j) * grid.dx();
      double v = u.junction;
      for (int k = 0; k < 3; ++k) v += amp[k] * (std::sin(freq[k] * s + phase[k]) - std::sin(phase[k]));
      u.values[i][j - 1] = v;
    }
  }
  return u;
}

GridFunction random_bump(const Grid& grid, std::uint64_t seed, double height) {
  if (!(height >= 0.0)) throw PreconditionError("bump height must be nonnegative");
  detail::Rng rng(seed ^ 0x5bd1e995u);
  GridFunction b = GridFunction::zeros(grid);
  double at_junction = 0.0;
  for (std::size_t i = 0; i < grid.branches(); ++i) {
    const double len = static_cast<double>(grid.nodes(i)) * grid.dx();
    const double h = rng.uniform(0.0, height);
    const double c = rng.uniform(0.0, 0.5 * len);
    const double w = rng.uniform(0.1, 0.5);
    auto f = [&](double s) { return h * std::max(0.0, 1.0 - std::abs(s - c) / w); };
    at_junction += f(0.0);
    for (std::size_t j = 1; j <= grid.nodes(i); ++j)
      b.values[i][j - 1] = f(static_cast<double>(j) * grid.dx());
  }
  b.junction = at_junction / static_cast<double>(grid.branches());
  return b;
}

double comparison_violation(const Trajectory& u, const Trajectory& v) {
  if (u.times != v.times) throw PreconditionError("trajectories have different snapshot times");
  const double initial = max_difference(u.snapshots.front(), v.snapshots.front());
  double worst = -kInf;
  for (std::size_t s = 0; s < u.snapshots.size(); ++s)
    worst = std::max(worst, max_difference(u.snapshots[s], v.snapshots[s]));
  return worst - initial;
}

double hopf_lax(const std::function<double(double)>& u0, const std::function<double(double)>& L,
                double y, double t, double h, double speed) {
  if (!(t > 0.0)) return u0(y);
  if (!(h > 0.0)) throw PreconditionError("oracle spacing must be positive");
  const auto m = static_cast<long>(std::ceil(speed * t / h));
  double best = kInf;
  for (long k = -m; k <= m; ++k) {
    const double z = y + static_cast<double>(k) * h;
    best = std::min(best, u0(z) + t * L((y - z) / t));
  }
  return best;
}

ExperimentResult run_comparison(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.table.columns = {"K", "dx", "seed", "solver", "violation"};

  std::vector<std::size_t> Ks = spec.branch_counts;
  if (Ks.empty()) Ks.push_back(spec.network.branches());

  struct Cell {
    std::size_t K;
    double dx;
    std::uint64_t seed;
    std::string solver;
    double violation = 0.0;
    std::string error;
  };
  std::vector<Cell> cells;
  for (auto K : Ks)
    for (double dx : spec.dx_ladder)
      for (std::size_t s = 0; s < spec.seeds; ++s)
        for (const auto& name : spec.solvers) cells.push_back({K, dx, spec.seed + s, name, 0.0, {}});

#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Cell& cell = cells[c];
    try {
      const Grid grid = build_grid(network_for(spec, cell.K), cell.dx);
      const auto hams = resolve_hamiltonians(spec, cell.K);
      const GridFunction u0 = make_initial(spec.initial, grid, cell.seed);
      GridFunction v0 = u0;
      const GridFunction bump = random_bump(grid, cell.seed, spec.bump_height);
      v0.junction += bump.junction;
      for (std::size_t i = 0; i < grid.branches(); ++i)
        for (std::size_t j = 0; j < grid.nodes(i); ++j) v0.values[i][j] += bump.values[i][j];

      const bool kirchhoff = spec.boundary.kind == BoundarySpec::Kind::kirchhoff;
      const double B = kirchhoff ? spec.boundary.value : 0.0;
      // Both runs share one slope range, hence one dt and one set of snapshot times.
      SolveConfig cfg = spec.solver;
      double junction_slope = std::abs(B) / static_cast<double>(cell.K);
      std::optional<FluxLimiterBC> fl;
      if (cell.solver == "flux_limiter") {
        const double A = (!kirchhoff && !spec.boundary.at_a0) ? spec.boundary.value
                                                              : a_naught(hams);
        fl = make_flux_limiter(hams, A);
        junction_slope = 0.0;
        for (const auto& h : hams) junction_slope = std::max(junction_slope, std::abs(p_A(h, A)));
      }
      if (!cfg.slope_bound)
        cfg.slope_bound = std::max(discrete_lipschitz(u0, cell.dx), discrete_lipschitz(v0, cell.dx)) +
                          2.0 + junction_slope;

      Trajectory tu{grid, Orientation::inward, {}, {}, 0.0}, tv = tu;
      if (cell.solver == "kirchhoff") {
        tu = solve(grid, hams, KirchhoffBC{B}, u0, spec.T, cfg);
        tv = solve(grid, hams, KirchhoffBC{B}, v0, spec.T, cfg);
      } else if (cell.solver == "flux_limiter") {
        tu = solve(grid, hams, *fl, u0, spec.T, cfg);
        tv = solve(grid, hams, *fl, v0, spec.T, cfg);
      } else if (cell.solver == "viscous") {
        const ViscousConfig vc{spec.epsilon, cfg};
        tu = viscous_solve(grid, hams, B, u0, spec.T, vc);
        tv = viscous_solve(grid, hams, B, v0, spec.T, vc);
      } else {
        throw PreconditionError("unknown solver '" + cell.solver + "'");
      }
      cell.violation = comparison_violation(tu, tv);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  }

  double worst = -kInf;
  for (const auto& cell : cells) {
    if (!cell.error.empty()) {
      std::ostringstream msg;
      msg << "seed " << cell.seed << " (K=" << cell.K << ", dx=" << cell.dx << ", "
          << cell.solver << "): " << cell.error;
      throw NumericFailure(msg.str());
    }
    res.table.add_row({static_cast<std::int64_t>(cell.K), cell.dx,
                       static_cast<std::int64_t>(cell.seed), cell.solver, cell.violation});
    if (cell.violation > spec.tol.comparison && cell.violation > worst) {
      std::ostringstream msg;
      msg << "comparison violated: " << cell.violation << " > " << spec.tol.comparison
          << " at seed " << cell.seed << " (K=" << cell.K << ", dx=" << cell.dx << ", "
          << cell.solver << ")";
      res.pass = false;
      res.diagnostic = msg.str();
    }
    worst = std::max(worst, cell.violation);
  }
  finish(res, spec, start);
  return res;
}

ExperimentResult run_wholeline(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  if (spec.network.branches() != 2) throw PreconditionError("whole-line recovery needs K = 2");
  if (spec.boundary.kind != BoundarySpec::Kind::kirchhoff || spec.boundary.value != 0.0)
    throw PreconditionError("whole-line recovery needs a Kirchhoff boundary with B = 0");
  if (spec.hamiltonians.size() == 2 && !(spec.hamiltonians[0] == spec.hamiltonians[1]))
    throw PreconditionError("whole-line recovery needs the same hamiltonian on both branches");
  const auto hams = resolve_hamiltonians(spec, 2);
  const HamiltonianSpec& H = hams[0];
  if (!H.convex_in_p || !H.xt_independent)
    throw PreconditionError("no Hopf-Lax oracle: hamiltonian '" + H.key + "' is not convex");
  // Identical branch hamiltonians describe one line equation only when H is even.
  for (double p : {0.3, 1.0, 2.5, 7.0})
    if (std::abs(H(p) - H(-p)) > 1e-12 * (1.0 + std::abs(H(p))))
      throw PreconditionError("whole-line recovery needs an even hamiltonian, H(p) = H(-p)");

  const auto profile = distance_profile(spec.initial);
  auto line_u0 = [&](double y) { return profile(std::abs(y)); };
  std::function<double(double)> L = H.legendre;
  if (!L) L = [&H](double v) { return legendre_numeric(H, v); };

  ExperimentResult res;
  res.table.columns = {"dx", "linf_error", "ratio"};
  const double radius = spec.eval_radius.value_or(
      0.5 * *std::min_element(spec.network.lengths.begin(), spec.network.lengths.end()));

  std::vector<double> errors;
  for (double dx : spec.dx_ladder) {
    const Grid grid = build_grid(spec.network, dx);
    const GridFunction u0 = make_initial(spec.initial, grid, spec.seed);
    const auto traj = solve(grid, hams, KirchhoffBC{0.0}, u0, spec.T, final_only(spec.solver));
    const GridFunction& u = traj.snapshots.back();

    const double lip = discrete_lipschitz(u0, dx);
    const double speed = 1.5 * H.lipschitz_p(SlopeRange{-lip, lip}) + dx;
    const double h = dx / 10.0;
    std::vector<double> node_err(grid.total_nodes() + 1, 0.0);
    // Flattened (branch, j) with j = 0 the junction; branch 1 is y <= 0.
    std::vector<std::pair<std::size_t, std::size_t>> nodes{{0, 0}};
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 1; j <= grid.nodes(i); ++j)
        if (static_cast<double>(j) * dx <= radius) nodes.emplace_back(i, j);
    detail::ExceptionSlot slot;
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      slot.run([&] {
        const auto [i, j] = nodes[k];
        const double y = (i == 0 ? -1.0 : 1.0) * static_cast<double>(j) * dx;
        node_err[k] = std::abs(u.at(i, j) - hopf_lax(line_u0, L, y, spec.T, h, speed));
      });
    }
    slot.rethrow();
    const double err = *std::max_element(node_err.begin(), node_err.end());
    errors.push_back(err);
    if (errors.size() == 1) {
      res.table.add_row({dx, err, std::string()});
    } else {
      const double prev = errors[errors.size() - 2];
      const double ratio = prev > 0.0 ? err / prev : 0.0;
      res.table.add_row({dx, err, ratio});
      if (prev > 1e-14 && ratio > spec.tol.halving_ratio)
        fail(res, "error ratio " + describe(ratio) + " at dx=" + describe(dx) + " exceeds " +
                      describe(spec.tol.halving_ratio));
    }
  }
  if (!errors.empty() && errors.back() > spec.tol.wholeline_error)
    fail(res, "finest error " + describe(errors.back()) + " exceeds " +
                  describe(spec.tol.wholeline_error));
  finish(res, spec, start);
  return res;
}

ExperimentResult run_equivalence(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  if (spec.boundary.kind != BoundarySpec::Kind::flux_limiter)
    throw PreconditionError("equivalence needs a flux_limiter boundary");
  const std::size_t K = spec.network.branches();
  const auto tilde = resolve_hamiltonians(spec, K);
  const double A = spec.boundary.at_a0 ? a_naught(tilde) : spec.boundary.value;
  const FluxLimiterBC fl = make_flux_limiter(tilde, A);
  const double B = a_to_b(tilde, A);
  std::vector<HamiltonianSpec> hams;
  for (const auto& h : tilde) hams.push_back(reflect(h));

  ExperimentResult res;
  res.table.columns = {"dx", "A", "B", "sup_distance"};
  std::vector<double> dist;
  for (double dx : spec.dx_ladder) {
    const Grid grid = build_grid(spec.network, dx);
    const GridFunction u0 = make_initial(spec.initial, grid, spec.seed);
    const auto cfg = final_only(spec.solver);
    const auto limited = to_inward(solve(grid, tilde, fl, u0, spec.T, cfg));
    const auto kirchhoff = solve(grid, hams, KirchhoffBC{B}, u0, spec.T, cfg);
    dist.push_back(evaluation_distance(spec, grid, limited.snapshots.back(),
                                       kirchhoff.snapshots.back()));
    res.table.add_row({dx, A, B, dist.back()});
  }
  if (!strictly_decreasing(dist)) fail(res, "distance column is not strictly decreasing");
  if (!dist.empty() && dist.back() > spec.tol.equivalence_final)
    fail(res, "finest distance " + describe(dist.back()) + " exceeds " +
                  describe(spec.tol.equivalence_final));
  finish(res, spec, start);
  return res;
}

ExperimentResult run_viscosity(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  if (spec.boundary.kind != BoundarySpec::Kind::kirchhoff)
    throw PreconditionError("the viscosity sweep needs a Kirchhoff boundary");
  const std::size_t K = spec.network.branches();
  ExperimentResult res;
  res.table.columns = {"epsilon", "dx", "dt", "T", "sup_distance"};
  for (double dx : spec.dx_ladder) {
    const Grid grid = build_grid(spec.network, dx);
    SweepProblem problem{grid,
                         resolve_hamiltonians(spec, K),
                         spec.boundary.value,
                         make_initial(spec.initial, grid, spec.seed),
                         spec.T,
                         spec.solver,
                         spec.eval_radius.value_or(kInf)};
    const auto rows = viscosity_sweep(spec.eps_list, problem);
    std::vector<double> d;
    for (const auto& r : rows) {
      res.table.add_row({r.epsilon, r.dx, r.dt, r.T, r.sup_distance});
      d.push_back(r.sup_distance);
    }
    if (!strictly_decreasing(d))
      fail(res, "distance column is not strictly decreasing at dx=" + describe(dx));
    if (!d.empty() && d.back() > spec.tol.viscosity_final)
      fail(res, "d(" + describe(rows.back().epsilon) + ") = " + describe(d.back()) +
                    " exceeds " + describe(spec.tol.viscosity_final) + " at dx=" + describe(dx));
  }
  finish(res, spec, start);
  return res;
}

namespace {

lemma::GeneratorParams generator_params(const ExperimentSpec& spec) {
  lemma::GeneratorParams g;
  g.density = spec.lemma.density;
  return g;
}

}  // namespace

ExperimentResult run_lemma_suite(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  const auto& Ks = spec.lemma.branch_counts;
  if (Ks.empty()) throw PreconditionError("lemma suite needs at least one branch count");
  ExperimentResult res;
  res.table.columns = {"index", "seed", "K", "a", "b", "a_minus_b", "cond_i_margin",
                       "cond_ii_margin", "cond_iii_margin"};
  const auto params = generator_params(spec);
  for (std::size_t k = 0; k < spec.lemma.instances; ++k) {
    const std::size_t K = Ks[k % Ks.size()];
    const std::uint64_t seed = spec.seed + k;
    const auto inst = lemma::random_satisfying_instance(seed, K, params);
    const std::size_t density = params.density ? params.density : lemma::default_density(K);
    const auto rep = lemma::check_hypotheses(inst, density, spec.tol.lemma);
    const double gap = inst.a - inst.b;
    res.table.add_row({static_cast<std::int64_t>(k), static_cast<std::int64_t>(seed),
                       static_cast<std::int64_t>(K), inst.a, inst.b, gap, rep.cond_i_margin,
                       rep.cond_ii_margin, rep.cond_iii_margin});
    if (gap > spec.tol.lemma)
      fail(res, "a - b = " + describe(gap) + " at seed " + std::to_string(seed));
  }
  finish(res, spec, start);
  return res;
}

ExperimentResult run_lemma_adversarial(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  const auto& Ks = spec.lemma.branch_counts;
  if (Ks.empty()) throw PreconditionError("adversarial search needs at least one branch count");
  ExperimentResult res;
  res.table.columns = {"K", "seed", "budget", "evaluations", "feasible", "a", "b", "a_minus_b"};
  const auto params = generator_params(spec);
  for (std::size_t k = 0; k < Ks.size(); ++k) {
    const std::uint64_t seed = spec.seed + k;
    const auto r = lemma::adversarial_search(seed, Ks[k], spec.lemma.budget, params);
    res.table.add_row({static_cast<std::int64_t>(Ks[k]), static_cast<std::int64_t>(seed),
                       static_cast<std::int64_t>(spec.lemma.budget),
                       static_cast<std::int64_t>(r.evaluations),
                       static_cast<std::int64_t>(r.feasible ? 1 : 0), r.best.a, r.best.b, r.gap});
    if (r.feasible && r.gap > spec.tol.adversarial)
      fail(res, "adversarial a - b = " + describe(r.gap) + " for K=" + std::to_string(Ks[k]));
  }
  finish(res, spec, start);
  return res;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::comparison: return run_comparison(spec);
    case ExperimentKind::wholeline: return run_wholeline(spec);
    case ExperimentKind::viscosity: return run_viscosity(spec);
    case ExperimentKind::equivalence: return run_equivalence(spec);
    case ExperimentKind::lemma_suite: return run_lemma_suite(spec);
    case ExperimentKind::lemma_adversarial: return run_lemma_adversarial(spec);
  }
  throw PreconditionError("unknown experiment kind");
}

void write_result(const ResultTable& table, const std::filesystem::path& path) {
  write_csv(table, path);
}

}  // namespace hjnet
