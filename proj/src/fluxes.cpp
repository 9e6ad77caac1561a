#include "hjnet/fluxes.hpp"

#include <cmath>

#include "hjnet/network.hpp"

namespace hjnet {

double lf_flux(const HamiltonianSpec& h, double alpha, double p_minus, double p_plus, double x,
               double t) {
  return h(0.5 * (p_minus + p_plus), x, t) - 0.5 * alpha * (p_plus - p_minus);
}

double godunov_flux(const FluxSplit& split, double p_minus, double p_plus, double x, double t) {
  return std::max(split.plus(p_minus, x, t), split.minus(p_plus, x, t));
}

double cfl_dt(double alpha, double dx, double cfl) {
  if (!(alpha > 0.0)) throw PreconditionError("cfl_dt needs a positive speed");
  if (!(dx > 0.0)) throw PreconditionError("cfl_dt needs dx > 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw PreconditionError("cfl must lie in (0,1]");
  return cfl * dx / alpha;
}

NumericalFlux::NumericalFlux(FluxKind kind, HamiltonianSpec h, double alpha)
    : kind_(kind), h_(std::move(h)), alpha_(alpha) {
  if (kind_ == FluxKind::godunov) split_ = split_flux_limiter(h_);
}

NumericalFlux NumericalFlux::lax_friedrichs(HamiltonianSpec h, double alpha) {
  if (!(alpha >= 0.0)) throw PreconditionError("LF alpha must be nonnegative");
  return NumericalFlux(FluxKind::lax_friedrichs, std::move(h), alpha);
}

NumericalFlux NumericalFlux::godunov(HamiltonianSpec h, double speed) {
  if (!h.convex_in_p) throw PreconditionError("Godunov flux needs a convex hamiltonian");
  return NumericalFlux(FluxKind::godunov, std::move(h), speed);
}

NumericalFlux NumericalFlux::for_range(FluxKind kind, const HamiltonianSpec& h,
                                       double slope_bound) {
  const double speed = h.lipschitz_p(SlopeRange{-slope_bound, slope_bound});
  if (kind == FluxKind::godunov) return godunov(h, speed);
  return lax_friedrichs(h, speed);
}

}  // namespace hjnet
