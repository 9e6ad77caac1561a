#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "hjnet/fluxes.hpp"
#include "hjnet/hamiltonians.hpp"
#include "hjnet/network.hpp"

namespace hjnet {

/// inward: branch coordinate x_i <= 0 with the junction at the right end (Kirchhoff
/// form). outward: x_i >= 0 with the junction at the left end (flux-limiter form).
/// Node j sits at distance j*dx from the junction in both cases, so converting a
/// flux-limiter solution u~ to u(x) = u~(-x) leaves the nodal arrays untouched.
enum class Orientation { inward, outward };

struct KirchhoffBC {
  double B = 0.0;
};

struct FluxLimiterBC {
  double A = 0.0;
  std::vector<FluxSplit> splits;
};

using JunctionBC = std::variant<KirchhoffBC, FluxLimiterBC>;

/// Validates A >= A0 and builds the per-branch splits.
FluxLimiterBC make_flux_limiter(std::span<const HamiltonianSpec> hams, double A);

struct Trajectory {
  Grid grid;
  Orientation orientation = Orientation::inward;
  std::vector<double> times;
  std::vector<GridFunction> snapshots;
  double dt = 0.0;
};

struct SolveConfig {
  FluxKind flux = FluxKind::lax_friedrichs;
  double cfl = 0.5;
  std::optional<double> alpha;        // LF diffusion override; does not change dt
  std::optional<double> dt;           // nominal step override
  std::size_t snapshot_stride = 1;
  std::optional<double> slope_bound;  // override of the working slope range
};

/// Step size, step count and per-branch fluxes for one run.
struct StepPlan {
  double dt = 0.0;
  std::size_t steps = 0;
  double slope_bound = 0.0;
  std::vector<NumericalFlux> fluxes;
};

/// Working slope range is [-L, L] with L = Lip(u0) + 2 + junction_slope, where
/// junction_slope is the slope the junction condition imposes (|B|/K or max |p^A|).
StepPlan plan_steps(const Grid& grid, std::span<const HamiltonianSpec> hams,
                    const GridFunction& u0, double T, double junction_slope,
                    const SolveConfig& config);

/// One forward-Euler sweep u_j <- u_j - dt * H^(D-u_j, D+u_j, x_j, t) on every
/// interior node; the far node follows its branch rule and the junction value is
/// copied through. OpenMP over nodes.
GridFunction interior_step(const Grid& grid, const GridFunction& u,
                           std::span<const NumericalFlux> fluxes, double dt, double t,
                           Orientation orientation = Orientation::inward);

/// Single-threaded reference for interior_step; results are bitwise identical.
GridFunction interior_step_serial(const Grid& grid, const GridFunction& u,
                                  std::span<const NumericalFlux> fluxes, double dt, double t,
                                  Orientation orientation = Orientation::inward);

/// Junction value z with sum_i (z - u_{i,1}) / dx = B.
double kirchhoff_junction_value(std::span<const double> first_interior, double B, double dx);

/// z <- z - dt * max(A, max_i minus_i((u_{i,1} - z) / dx)).
double flux_limiter_junction_step(double junction, std::span<const double> first_interior,
                                  double A, std::span<const FluxSplit> splits, double dx,
                                  double dt);

std::vector<double> first_interior(const GridFunction& u);

/// Explicit junction solver. For FluxLimiterBC the hamiltonians and data are in the
/// outward orientation.
Trajectory solve(const Grid& grid, std::span<const HamiltonianSpec> hams, const JunctionBC& bc,
                 const GridFunction& u0, double T, const SolveConfig& config = {});

/// Reinterpret an outward (flux-limiter) trajectory as the inward solution u(x) = u~(-x).
Trajectory to_inward(Trajectory traj);

struct SlopeInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// min / max over j = 1..m of the one-sided difference quotients at the junction,
/// (u_junction - u_{i,j}) / (j dx) for the inward orientation.
SlopeInterval slope_interval(const Grid& grid, const GridFunction& u, std::size_t branch,
                             std::size_t m, Orientation orientation = Orientation::inward);

struct ResidualOptions {
  std::size_t stencil = 5;
  std::size_t density = 41;
};

struct ResidualReport {
  double sub_worst = 0.0;    // should be <= tol for a subsolution
  double super_worst = 0.0;  // should be >= -tol for a supersolution
  double time_derivative = 0.0;
  std::vector<SlopeInterval> slopes;
  std::vector<double> sub_witness;
  std::vector<double> super_witness;

  bool flagged(double tol) const { return sub_worst > tol || super_worst < -tol; }
};

/// Checks the generalized Kirchhoff junction inequalities on snapshot n (inward
/// orientation) against every test slope tuple the jets allow.
ResidualReport generalized_residual(const Trajectory& traj, std::size_t n,
                                    std::span<const HamiltonianSpec> hams, double B,
                                    const ResidualOptions& options = {});

/// CSV rows (t, branch, node_index, x, u); the junction row has branch 0, x 0.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace hjnet
