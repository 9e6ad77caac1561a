#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hjnet {

/// Closed slope range [lo, hi].
struct SlopeRange {
  double lo;
  double hi;
};

/// An evaluable Hamiltonian H(p, x, t) together with the structural facts the
/// schemes and the flux-limiter constructions rely on.
struct HamiltonianSpec {
  std::string key;              // catalog name, for echoing into outputs
  std::vector<double> params;   // catalog parameters
  std::function<double(double p, double x, double t)> eval;
  bool convex_in_p = false;
  std::optional<double> p0;     // argmin in p, independent of (x, t)
  bool xt_independent = true;
  /// Bound on |dH/dp| for slopes in the given range.
  std::function<double(SlopeRange)> lipschitz_p;
  /// Nondecreasing, unbounded w with H(p, x, t) >= w(|p|).
  std::function<double(double)> coercivity_witness;
  /// Convex conjugate in p (x, t independent entries only). May be +inf.
  std::function<double(double)> legendre;

  double operator()(double p, double x = 0.0, double t = 0.0) const { return eval(p, x, t); }
};

namespace catalog {

/// a (p - b)^2 + c, a > 0.
HamiltonianSpec quadratic(double a, double b, double c);
/// a |p - b| + c, a > 0.
HamiltonianSpec absolute(double a, double b, double c);
/// |p^2 - 1|; coercive but not convex.
HamiltonianSpec double_well();
/// base(p, x, t) + amplitude * sin(frequency * t).
HamiltonianSpec time_modulated(const HamiltonianSpec& base, double amplitude, double frequency);

/// Builds a catalog entry from its config key and parameter list.
HamiltonianSpec make(const std::string& key, std::span<const double> params);

}  // namespace catalog

/// Nonincreasing / nondecreasing envelopes of a convex H split at its argmin:
/// minus(p) = H(min(p, p0)), plus(p) = H(max(p, p0)).
struct FluxSplit {
  HamiltonianSpec h;
  double p0 = 0.0;

  double minus(double p, double x = 0.0, double t = 0.0) const { return h(p < p0 ? p : p0, x, t); }
  double plus(double p, double x = 0.0, double t = 0.0) const { return h(p > p0 ? p : p0, x, t); }
};

FluxSplit split_flux_limiter(const HamiltonianSpec& h);

/// Golden-section minimiser for convex H on [lo, hi]; accurate to 1e-10.
double argmin_convex(const HamiltonianSpec& h, SlopeRange bracket);

/// max_i min_p H_i(p): the smallest admissible flux limiter.
double a_naught(std::span<const HamiltonianSpec> hams);

/// The slope p >= p0 with H(p) = A.
double p_A(const HamiltonianSpec& h, double A);

/// Kirchhoff constant matching flux limiter A: B = -sum_i p_A(H_i, A).
double a_to_b(std::span<const HamiltonianSpec> hams, double A);

/// H'(p, x, t) = H(-p, -x, t).
HamiltonianSpec reflect(const HamiltonianSpec& h);

/// sup_p (p v - H(p)) by golden-section search on [-R, R].
double legendre_numeric(const HamiltonianSpec& h, double v, double R = 50.0);

}  // namespace hjnet
