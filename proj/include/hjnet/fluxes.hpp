#pragma once

#include <optional>

#include "hjnet/hamiltonians.hpp"

namespace hjnet {

enum class FluxKind { lax_friedrichs, godunov };

/// Lax-Friedrichs: H((p- + p+)/2) - alpha (p+ - p-)/2.
double lf_flux(const HamiltonianSpec& h, double alpha, double p_minus, double p_plus, double x,
               double t);

/// Godunov flux for convex H: max(plus(p-), minus(p+)).
double godunov_flux(const FluxSplit& split, double p_minus, double p_plus, double x = 0.0,
                    double t = 0.0);

double cfl_dt(double alpha, double dx, double cfl);

/// Monotone two-point numerical Hamiltonian bound to one branch.
class NumericalFlux {
 public:
  static NumericalFlux lax_friedrichs(HamiltonianSpec h, double alpha);
  /// `speed` bounds |H_p| over the slopes the scheme visits.
  static NumericalFlux godunov(HamiltonianSpec h, double speed);
  /// LF with alpha = max |H_p| on [-slope_bound, slope_bound], or Godunov.
  static NumericalFlux for_range(FluxKind kind, const HamiltonianSpec& h, double slope_bound);

  double operator()(double p_minus, double p_plus, double x, double t) const {
    if (kind_ == FluxKind::lax_friedrichs) return lf_flux(h_, alpha_, p_minus, p_plus, x, t);
    return godunov_flux(*split_, p_minus, p_plus, x, t);
  }

  FluxKind kind() const { return kind_; }
  /// Speed bound that limits the explicit step: dt * speed <= dx keeps the update monotone.
  double speed() const { return alpha_; }
  const HamiltonianSpec& hamiltonian() const { return h_; }

 private:
  NumericalFlux(FluxKind kind, HamiltonianSpec h, double alpha);

  FluxKind kind_;
  HamiltonianSpec h_;
  double alpha_;
  std::optional<FluxSplit> split_;
};

}  // namespace hjnet
