#pragma once

#include <limits>
#include <vector>

#include "hjnet/evolve.hpp"

namespace hjnet {

/// One branch of an arrowhead system: a tridiagonal block T_i, the column c_i
/// coupling its rows to the junction unknown z, and the junction-row
/// coefficients r_i multiplying this branch's unknowns.
///
///   T_i u_i + c_i z            = f_i      (every branch)
///   sum_i r_i . u_i + d z      = g        (junction row)
struct BranchBlock {
  std::vector<double> lower;  // lower[k] multiplies u[k-1]; lower[0] unused
  std::vector<double> diag;
  std::vector<double> upper;  // upper[k] multiplies u[k+1]; upper[n-1] unused
  std::vector<double> coupling;
  std::vector<double> junction_row;
  std::vector<double> rhs;

  std::size_t size() const { return diag.size(); }
};

struct ArrowheadSystem {
  std::vector<BranchBlock> blocks;
  double junction_diag = 1.0;
  double junction_rhs = 0.0;
};

/// Implicit-diffusion rows (I - dt eps Delta) u^{n+1} = explicit_update on the interior,
/// far rows per branch rule, and the junction row K z - sum_i u_{i,1} = B dx.
ArrowheadSystem assemble(const Grid& grid, double epsilon, double dt,
                         const GridFunction& explicit_update, double B);

/// Branch-wise Thomas elimination, scalar Schur complement for z, back-substitution.
/// Branch sweeps run under OpenMP.
GridFunction arrowhead_solve(const ArrowheadSystem& sys);
GridFunction arrowhead_solve_serial(const ArrowheadSystem& sys);

/// sum_i (z - u_{i,1}) / dx - B.
double kirchhoff_residual(const GridFunction& u, double B, double dx);

struct ViscousConfig {
  double epsilon = 0.1;
  SolveConfig explicit_part;
};

/// IMEX loop: explicit monotone Hamiltonian step, implicit diffusion with exact
/// discrete Kirchhoff coupling.
Trajectory viscous_solve(const Grid& grid, std::span<const HamiltonianSpec> hams, double B,
                         const GridFunction& u0, double T, const ViscousConfig& config);

struct SweepRow {
  double epsilon;
  double dx;
  double dt;
  double T;
  double sup_distance;
};

/// Shared problem for the epsilon sweep; distances are measured on |x| <= eval_radius.
struct SweepProblem {
  Grid grid;
  std::vector<HamiltonianSpec> hams;
  double B = 0.0;
  GridFunction u0;
  double T = 0.5;
  SolveConfig solver;
  double eval_radius = std::numeric_limits<double>::infinity();
};

/// Distance between the viscous solution and the explicit Kirchhoff solution at T,
/// one row per epsilon.
std::vector<SweepRow> viscosity_sweep(std::span<const double> eps_list,
                                      const SweepProblem& problem);

}  // namespace hjnet
