#include "hjnet/viscous.hpp"

#include <cmath>
#include <sstream>

#include "hjnet/detail/parallel.hpp"

namespace hjnet {

namespace {

struct BranchSolution {
  std::vector<double> y;  // T^{-1} f
  std::vector<double> w;  // T^{-1} c
};

// Thomas elimination for two right-hand sides sharing one tridiagonal matrix.
BranchSolution thomas_two_rhs(const BranchBlock& b) {
  const std::size_t n = b.size();
  std::vector<double> cp(n), y(n), w(n);
  double m = b.diag[0];
  if (m == 0.0) throw NumericFailure("zero pivot in tridiagonal block");
  cp[0] = n > 1 ? b.upper[0] / m : 0.0;
  y[0] = b.rhs[0] / m;
  w[0] = b.coupling[0] / m;
  for (std::size_t k = 1; k < n; ++k) {
    m = b.diag[k] - b.lower[k] * cp[k - 1];
    if (m == 0.0) throw NumericFailure("zero pivot in tridiagonal block");
    cp[k] = k + 1 < n ? b.upper[k] / m : 0.0;
    y[k] = (b.rhs[k] - b.lower[k] * y[k - 1]) / m;
    w[k] = (b.coupling[k] - b.lower[k] * w[k - 1]) / m;
  }
  for (std::size_t k = n - 1; k-- > 0;) {
    y[k] -= cp[k] * y[k + 1];
    w[k] -= cp[k] * w[k + 1];
  }
  return {std::move(y), std::move(w)};
}

GridFunction finish_schur(const ArrowheadSystem& sys, const std::vector<BranchSolution>& parts) {
  double s = sys.junction_diag;
  double g = sys.junction_rhs;
  for (std::size_t i = 0; i < sys.blocks.size(); ++i) {
    const auto& r = sys.blocks[i].junction_row;
    for (std::size_t k = 0; k < r.size(); ++k) {
      s -= r[k] * parts[i].w[k];
      g -= r[k] * parts[i].y[k];
    }
  }
  if (s == 0.0) throw NumericFailure("singular Schur complement at the junction");
  GridFunction u;
  u.junction = g / s;
  u.values.resize(sys.blocks.size());
  for (std::size_t i = 0; i < sys.blocks.size(); ++i) {
    const std::size_t n = sys.blocks[i].size();
    u.values[i].resize(n);
    for (std::size_t k = 0; k < n; ++k) u.values[i][k] = parts[i].y[k] - parts[i].w[k] * u.junction;
  }
  return u;
}

void check_system(const ArrowheadSystem& sys) {
  if (sys.blocks.empty()) throw PreconditionError("arrowhead system has no branches");
  for (const auto& b : sys.blocks) {
    const std::size_t n = b.size();
    if (n == 0 || b.lower.size() != n || b.upper.size() != n || b.coupling.size() != n ||
        b.junction_row.size() != n || b.rhs.size() != n)
      throw PreconditionError("inconsistent branch block sizes");
  }
}

}  // namespace

ArrowheadSystem assemble(const Grid& grid, double epsilon, double dt,
                         const GridFunction& explicit_update, double B) {
  if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
  if (!(epsilon >= 0.0)) throw PreconditionError("epsilon must be nonnegative");
  if (!explicit_update.matches(grid)) throw PreconditionError("update does not match the grid");
  const double dx = grid.dx();
  const double r = dt * epsilon / (dx * dx);

  ArrowheadSystem sys;
  sys.junction_diag = static_cast<double>(grid.branches());
  sys.junction_rhs = B * dx;
  for (std::size_t i = 0; i < grid.branches(); ++i) {
    const std::size_t n = grid.nodes(i);
    BranchBlock b;
    b.lower.assign(n, -r);
    b.diag.assign(n, 1.0 + 2.0 * r);
    b.upper.assign(n, -r);
    b.coupling.assign(n, 0.0);
    b.junction_row.assign(n, 0.0);
    b.rhs = explicit_update.values[i];
    b.lower[0] = 0.0;
    b.coupling[0] = -r;
    b.upper[n - 1] = 0.0;
    if (grid.far_bc(i) == FarBoundary::frozen) {
      b.lower[n - 1] = 0.0;
      b.diag[n - 1] = 1.0;
    } else {
      b.diag[n - 1] = 1.0 + r;  // ghost node mirrors the far node
    }
    b.junction_row[0] = -1.0;
    sys.blocks.push_back(std::move(b));
  }
  return sys;
}

GridFunction arrowhead_solve(const ArrowheadSystem& sys) {
  check_system(sys);
  const std::size_t K = sys.blocks.size();
  std::vector<BranchSolution> parts(K);
  std::size_t total = 0;
  for (const auto& b : sys.blocks) total += b.size();
  detail::ExceptionSlot slot;
#pragma omp parallel for schedule(static) if (K > 1 && total >= 8192)
  for (std::size_t i = 0; i < K; ++i) slot.run([&] { parts[i] = thomas_two_rhs(sys.blocks[i]); });
  slot.rethrow();
  return finish_schur(sys, parts);
}

GridFunction arrowhead_solve_serial(const ArrowheadSystem& sys) {
  check_system(sys);
  std::vector<BranchSolution> parts;
  for (const auto& b : sys.blocks) parts.push_back(thomas_two_rhs(b));
  return finish_schur(sys, parts);
}

double kirchhoff_residual(const GridFunction& u, double B, double dx) {
  double s = 0.0;
  for (const auto& branch : u.values) s += (u.junction - branch.front()) / dx;
  return s - B;
}

Trajectory viscous_solve(const Grid& grid, std::span<const HamiltonianSpec> hams, double B,
                         const GridFunction& u0, double T, const ViscousConfig& config) {
  if (!(config.epsilon >= 0.0)) throw PreconditionError("epsilon must be nonnegative");
  const auto& sc = config.explicit_part;
  const StepPlan plan =
      plan_steps(grid, hams, u0, T, std::abs(B) / static_cast<double>(grid.branches()), sc);

  Trajectory traj{grid, Orientation::inward, {0.0}, {u0}, plan.dt};
  GridFunction u = u0;
  for (std::size_t n = 0; n < plan.steps; ++n) {
    const double t = static_cast<double>(n) * plan.dt;
    const GridFunction ex = interior_step(grid, u, plan.fluxes, plan.dt, t, Orientation::inward);
    GridFunction next = arrowhead_solve(assemble(grid, config.epsilon, plan.dt, ex, B));
    if (!next.all_finite()) {
      std::ostringstream msg;
      msg << "non-finite value after viscous step " << n + 1 << " (t=" << t + plan.dt << ")" << " at "
          << next.first_nonfinite();
      throw NumericFailure(msg.str());
    }
    u = std::move(next);
    if ((n + 1) % sc.snapshot_stride == 0 || n + 1 == plan.steps) {
      traj.times.push_back(n + 1 == plan.steps ? T : static_cast<double>(n + 1) * plan.dt);
      traj.snapshots.push_back(u);
    }
  }
  return traj;
}

std::vector<SweepRow> viscosity_sweep(std::span<const double> eps_list,
                                      const SweepProblem& problem) {
  if (eps_list.empty()) throw PreconditionError("epsilon list is empty");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0)) throw PreconditionError("epsilon values must be positive");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
      throw PreconditionError("epsilon list must be strictly decreasing");
  }
  SolveConfig final_only = problem.solver;
  final_only.snapshot_stride = std::numeric_limits<std::size_t>::max();
  const auto inviscid = solve(problem.grid, problem.hams, KirchhoffBC{problem.B}, problem.u0,
                              problem.T, final_only);
  std::vector<SweepRow> rows;
  for (double eps : eps_list) {
    const auto visc = viscous_solve(problem.grid, problem.hams, problem.B, problem.u0, problem.T,
                                    ViscousConfig{eps, final_only});
    rows.push_back({eps, problem.grid.dx(), visc.dt, problem.T,
                    sup_distance(visc.snapshots.back(), inviscid.snapshots.back(), problem.grid,
                                 problem.eval_radius)});
  }
  return rows;
}

}  // namespace hjnet
