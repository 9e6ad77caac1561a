#include "hjnet/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hjnet/csv.hpp"
#include "hjnet/lemma_lab.hpp"
#include "hjnet/detail/parallel.hpp"

namespace hjnet {

namespace {

// Interior nodes per branch below which the OpenMP region costs more than it saves.
constexpr std::size_t kParallelThreshold = 2048;

void check_cfl(const Grid& grid, std::span<const NumericalFlux> fluxes, double dt) {
  if (fluxes.size() != grid.branches())
    throw PreconditionError("need one numerical flux per branch");
  if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
  for (std::size_t i = 0; i < fluxes.size(); ++i) {
    if (dt * fluxes[i].speed() > grid.dx() * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "CFL violation on branch " << i + 1 << ": dt=" << dt << " exceeds dx/speed="
          << grid.dx() / fluxes[i].speed();
      throw PreconditionError(msg.str());
    }
  }
}

inline double update_node(const NumericalFlux& flux, std::span<const double> v, double junction,
                          std::size_t j, std::size_t n, FarBoundary far, double dx, double dt,
                          double t, Orientation orientation) {
  // v is 0-based: node j lives at v[j - 1].
  const double here = v[j - 1];
  const double toward = j == 1 ? junction : v[j - 2];
  const double away = j == n ? here : v[j];
  if (j == n && far == FarBoundary::frozen) return here;
  const double dist = static_cast<double>(j) * dx;
  if (orientation == Orientation::inward) {
    const double dm = (here - away) / dx;
    const double dp = (toward - here) / dx;
    return here - dt * flux(dm, dp, -dist, t);
  }
  const double dm = (here - toward) / dx;
  const double dp = (away - here) / dx;
  return here - dt * flux(dm, dp, dist, t);
}

}  // namespace

FluxLimiterBC make_flux_limiter(std::span<const HamiltonianSpec> hams, double A) {
  const double a0 = a_naught(hams);
  if (A < a0) {
    std::ostringstream msg;
    msg << "flux limiter A=" << A << " is below A0=" << a0;
    throw PreconditionError(msg.str());
  }
  FluxLimiterBC bc;
  bc.A = A;
  for (const auto& h : hams) bc.splits.push_back(split_flux_limiter(h));
  return bc;
}

StepPlan plan_steps(const Grid& grid, std::span<const HamiltonianSpec> hams,
                    const GridFunction& u0, double T, double junction_slope,
                    const SolveConfig& config) {
  if (hams.size() != grid.branches()) throw PreconditionError("need one hamiltonian per branch");
  if (!u0.matches(grid)) throw PreconditionError("initial data does not match the grid");
  if (!(T > 0.0)) throw PreconditionError("final time T must be positive");
  if (!(config.cfl > 0.0 && config.cfl <= 1.0)) throw PreconditionError("cfl must lie in (0,1]");
  if (config.snapshot_stride == 0) throw PreconditionError("snapshot stride must be >= 1");

  StepPlan plan;
  plan.slope_bound = config.slope_bound.value_or(discrete_lipschitz(u0, grid.dx()) + 2.0 +
                                                 std::abs(junction_slope));
  double speed = 0.0;
  for (const auto& h : hams) {
    const double s = h.lipschitz_p(SlopeRange{-plan.slope_bound, plan.slope_bound});
    speed = std::max(speed, s);
    if (config.flux == FluxKind::godunov) {
      plan.fluxes.push_back(NumericalFlux::godunov(h, s));
    } else {
      plan.fluxes.push_back(NumericalFlux::lax_friedrichs(h, config.alpha.value_or(s)));
    }
  }
  double nominal = config.dt ? *config.dt : cfl_dt(speed, grid.dx(), config.cfl);
  if (!(nominal > 0.0)) throw PreconditionError("dt must be positive");
  plan.steps = static_cast<std::size_t>(std::ceil(T / nominal - 1e-9));
  if (plan.steps == 0) plan.steps = 1;
  plan.dt = T / static_cast<double>(plan.steps);
  return plan;
}

GridFunction interior_step(const Grid& grid, const GridFunction& u,
                           std::span<const NumericalFlux> fluxes, double dt, double t,
                           Orientation orientation) {
  check_cfl(grid, fluxes, dt);
  GridFunction next = u;
  const double dx = grid.dx();
  for (std::size_t i = 0; i < grid.branches(); ++i) {
    const std::span<const double> v = u.values[i];
    double* out = next.values[i].data();
    const std::size_t n = grid.nodes(i);
    const FarBoundary far = grid.far_bc(i);
    const NumericalFlux& flux = fluxes[i];
    detail::ExceptionSlot slot;
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::size_t j = 1; j <= n; ++j)
      slot.run([&] { out[j - 1] = update_node(flux, v, u.junction, j, n, far, dx, dt, t, orientation); });
    slot.rethrow();
  }
  return next;
}

GridFunction interior_step_serial(const Grid& grid, const GridFunction& u,
                                  std::span<const NumericalFlux> fluxes, double dt, double t,
                                  Orientation orientation) {
  check_cfl(grid, fluxes, dt);
  GridFunction next = u;
  for (std::size_t i = 0; i < grid.branches(); ++i) {
    const std::size_t n = grid.nodes(i);
    for (std::size_t j = 1; j <= n; ++j)
      next.values[i][j - 1] = update_node(fluxes[i], u.values[i], u.junction, j, n,
                                          grid.far_bc(i), grid.dx(), dt, t, orientation);
  }
  return next;
}

double kirchhoff_junction_value(std::span<const double> first_interior, double B, double dx) {
  if (first_interior.empty()) throw PreconditionError("Kirchhoff update needs K >= 1");
  if (!(dx > 0.0)) throw PreconditionError("dx must be positive");
  double sum = 0.0;
  for (double v : first_interior) sum += v;
  return (sum + B * dx) / static_cast<double>(first_interior.size());
}

double flux_limiter_junction_step(double junction, std::span<const double> first_interior,
                                  double A, std::span<const FluxSplit> splits, double dx,
                                  double dt) {
  if (splits.size() != first_interior.size() || splits.empty())
    throw PreconditionError("need one flux split per branch");
  double a0 = splits[0].h(splits[0].p0);
  for (const auto& s : splits) a0 = std::max(a0, s.h(s.p0));
  if (A < a0) {
    std::ostringstream msg;
    msg << "flux limiter A=" << A << " is below A0=" << a0;
    throw PreconditionError(msg.str());
  }
  double rate = A;
  for (std::size_t i = 0; i < splits.size(); ++i)
    rate = std::max(rate, splits[i].minus((first_interior[i] - junction) / dx));
  return junction - dt * rate;
}

std::vector<double> first_interior(const GridFunction& u) {
  std::vector<double> out;
  out.reserve(u.values.size());
  for (const auto& branch : u.values) out.push_back(branch.front());
  return out;
}

Trajectory solve(const Grid& grid, std::span<const HamiltonianSpec> hams, const JunctionBC& bc,
                 const GridFunction& u0, double T, const SolveConfig& config) {
  double junction_slope = 0.0;
  Orientation orientation = Orientation::inward;
  if (const auto* k = std::get_if<KirchhoffBC>(&bc)) {
    junction_slope = std::abs(k->B) / static_cast<double>(grid.branches());
  } else {
    const auto& fl = std::get<FluxLimiterBC>(bc);
    if (fl.splits.size() != grid.branches())
      throw PreconditionError("flux limiter needs one split per branch");
    for (const auto& h : hams) junction_slope = std::max(junction_slope, std::abs(p_A(h, fl.A)));
    orientation = Orientation::outward;
  }
  const StepPlan plan = plan_steps(grid, hams, u0, T, junction_slope, config);

  Trajectory traj{grid, orientation, {0.0}, {u0}, plan.dt};
  GridFunction u = u0;
  for (std::size_t n = 0; n < plan.steps; ++n) {
    const double t = static_cast<double>(n) * plan.dt;
    GridFunction next = interior_step(grid, u, plan.fluxes, plan.dt, t, orientation);
    if (const auto* k = std::get_if<KirchhoffBC>(&bc)) {
      next.junction = kirchhoff_junction_value(first_interior(next), k->B, grid.dx());
    } else {
      const auto& fl = std::get<FluxLimiterBC>(bc);
      next.junction = flux_limiter_junction_step(u.junction, first_interior(u), fl.A, fl.splits,
                                                 grid.dx(), plan.dt);
    }
    if (!next.all_finite()) {
      std::ostringstream msg;
      msg << "non-finite value after step " << n + 1 << " (t=" << t + plan.dt << ")" << " at "
          << next.first_nonfinite();
      throw NumericFailure(msg.str());
    }
    u = std::move(next);
    if ((n + 1) % config.snapshot_stride == 0 || n + 1 == plan.steps) {
      traj.times.push_back(n + 1 == plan.steps ? T : static_cast<double>(n + 1) * plan.dt);
      traj.snapshots.push_back(u);
    }
  }
  return traj;
}

Trajectory to_inward(Trajectory traj) {
  traj.orientation = Orientation::inward;
  return traj;
}

SlopeInterval slope_interval(const Grid& grid, const GridFunction& u, std::size_t branch,
                             std::size_t m, Orientation orientation) {
  if (branch >= grid.branches()) throw PreconditionError("branch index out of range");
  if (m == 0 || m > grid.nodes(branch)) throw PreconditionError("stencil count out of range");
  SlopeInterval s{std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  const double sign = orientation == Orientation::inward ? 1.0 : -1.0;
  for (std::size_t j = 1; j <= m; ++j) {
    const double q = sign * (u.junction - u.values[branch][j - 1]) /
                     (static_cast<double>(j) * grid.dx());
    s.lo = std::min(s.lo, q);
    s.hi = std::max(s.hi, q);
  }
  return s;
}

ResidualReport generalized_residual(const Trajectory& traj, std::size_t n,
                                    std::span<const HamiltonianSpec> hams, double B,
                                    const ResidualOptions& options) {
  if (n == 0 || n + 1 >= traj.snapshots.size())
    throw PreconditionError("generalized residual needs a snapshot with neighbours in time");
  if (hams.size() != traj.grid.branches())
    throw PreconditionError("need one hamiltonian per branch");
  const auto& u = traj.snapshots[n];
  ResidualReport rep;
  rep.time_derivative = (traj.snapshots[n + 1].junction - traj.snapshots[n - 1].junction) /
                        (traj.times[n + 1] - traj.times[n - 1]);
  std::vector<double> lo, hi;
  for (std::size_t i = 0; i < traj.grid.branches(); ++i) {
    const std::size_t m = std::min(options.stencil, traj.grid.nodes(i));
    rep.slopes.push_back(slope_interval(traj.grid, u, i, m, traj.orientation));
    lo.push_back(rep.slopes.back().lo);
    hi.push_back(rep.slopes.back().hi);
  }
  const double t = traj.times[n];
  auto sub = lemma::sub_side(hams, lo, rep.time_derivative, B, t, options.density);
  auto super = lemma::super_side(hams, hi, rep.time_derivative, B, t, options.density);
  rep.sub_worst = sub.margin;
  rep.super_worst = -super.margin;
  rep.sub_witness = std::move(sub.witness);
  rep.super_witness = std::move(super.witness);
  return rep;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,branch,node_index,x,u\n";
  const double sign = traj.orientation == Orientation::inward ? -1.0 : 1.0;
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const std::string t = format_real(traj.times[s]);
    const auto& u = traj.snapshots[s];
    out << t << ",0,0," << format_real(0.0) << ',' << format_real(u.junction) << '\n';
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      for (std::size_t j = 1; j <= u.values[i].size(); ++j) {
        out << t << ',' << i + 1 << ',' << j << ','
            << format_real(sign * static_cast<double>(j) * traj.grid.dx()) << ','
            << format_real(u.values[i][j - 1]) << '\n';
      }
    }
  }
}

}  // namespace hjnet
