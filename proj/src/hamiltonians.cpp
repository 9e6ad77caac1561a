#include "hjnet/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hjnet/network.hpp"

namespace hjnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvPhi = 0.6180339887498949;

void require_params(const std::string& key, std::span<const double> params, std::size_t n) {
  if (params.size() != n) {
    std::ostringstream msg;
    msg << "hamiltonian '" << key << "' takes " << n << " parameters, got " << params.size();
    throw PreconditionError(msg.str());
  }
}

void require_section5(const HamiltonianSpec& h) {
  if (!h.convex_in_p || !h.p0)
    throw PreconditionError("hamiltonian '" + h.key + "' is not convex with a known argmin");
  if (!h.xt_independent)
    throw PreconditionError("hamiltonian '" + h.key + "' depends on (x, t)");
}

// Golden-section search for the minimiser of a unimodal f on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi, double tol) {
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

namespace catalog {

HamiltonianSpec quadratic(double a, double b, double c) {
  if (!(a > 0.0)) throw PreconditionError("quadratic hamiltonian needs a > 0");
  HamiltonianSpec h;
  h.key = "quadratic";
  h.params = {a, b, c};
  h.eval = [a, b, c](double p, double, double) { return a * (p - b) * (p - b) + c; };
  h.convex_in_p = true;
  h.p0 = b;
  h.lipschitz_p = [a, b](SlopeRange r) {
    return 2.0 * a * std::max(std::abs(r.lo - b), std::abs(r.hi - b));
  };
  h.coercivity_witness = [a, b, c](double r) {
    const double s = std::max(0.0, r - std::abs(b));
    return a * s * s + c;
  };
  h.legendre = [a, b, c](double v) { return b * v + v * v / (4.0 * a) - c; };
  return h;
}

HamiltonianSpec absolute(double a, double b, double c) {
  if (!(a > 0.0)) throw PreconditionError("absolute hamiltonian needs a > 0");
  HamiltonianSpec h;
  h.key = "absolute";
  h.params = {a, b, c};
  h.eval = [a, b, c](double p, double, double) { return a * std::abs(p - b) + c; };
  h.convex_in_p = true;
  h.p0 = b;
  h.lipschitz_p = [a](SlopeRange) { return a; };
  h.coercivity_witness = [a, b, c](double r) { return a * std::max(0.0, r - std::abs(b)) + c; };
  h.legendre = [a, b, c](double v) { return std::abs(v) <= a ? b * v - c : kInf; };
  return h;
}

HamiltonianSpec double_well() {
  HamiltonianSpec h;
  h.key = "double_well";
  h.eval = [](double p, double, double) { return std::abs(p * p - 1.0); };
  h.convex_in_p = false;
  h.lipschitz_p = [](SlopeRange r) { return 2.0 * std::max(std::abs(r.lo), std::abs(r.hi)); };
  h.coercivity_witness = [](double r) { return r * r - 1.0; };
  return h;
}

HamiltonianSpec time_modulated(const HamiltonianSpec& base, double amplitude, double frequency) {
  HamiltonianSpec h = base;
  h.key = base.key + "_modulated";
  h.params.push_back(amplitude);
  h.params.push_back(frequency);
  auto inner = base.eval;
  h.eval = [inner, amplitude, frequency](double p, double x, double t) {
    return inner(p, x, t) + amplitude * std::sin(frequency * t);
  };
  auto witness = base.coercivity_witness;
  h.coercivity_witness = [witness, amplitude](double r) { return witness(r) - std::abs(amplitude); };
  h.xt_independent = false;
  h.legendre = nullptr;
  return h;
}

HamiltonianSpec make(const std::string& key, std::span<const double> params) {
  if (key == "quadratic") {
    require_params(key, params, 3);
    return quadratic(params[0], params[1], params[2]);
  }
  if (key == "absolute") {
    require_params(key, params, 3);
    return absolute(params[0], params[1], params[2]);
  }
  if (key == "double_well") {
    require_params(key, params, 0);
    return double_well();
  }
  if (key == "quadratic_modulated") {
    require_params(key, params, 5);
    return time_modulated(quadratic(params[0], params[1], params[2]), params[3], params[4]);
  }
  if (key == "absolute_modulated") {
    require_params(key, params, 5);
    return time_modulated(absolute(params[0], params[1], params[2]), params[3], params[4]);
  }
  throw PreconditionError("unknown hamiltonian '" + key + "'");
}

}  // namespace catalog

FluxSplit split_flux_limiter(const HamiltonianSpec& h) {
  if (!h.convex_in_p) throw PreconditionError("flux split needs a convex hamiltonian");
  if (!h.p0) throw PreconditionError("flux split needs the argmin p0");
  return FluxSplit{h, *h.p0};
}

double argmin_convex(const HamiltonianSpec& h, SlopeRange bracket) {
  if (!h.convex_in_p) throw PreconditionError("argmin_convex needs a convex hamiltonian");
  if (!(bracket.lo < bracket.hi)) throw PreconditionError("empty bracket");
  auto f = [&h](double p) { return h(p); };
  const double x = golden_min(f, bracket.lo, bracket.hi, 1e-13);
  // A minimiser pinned to an end means the samples were monotone on the bracket.
  const double edge = 1e-9 * (bracket.hi - bracket.lo);
  if (x - bracket.lo < edge || bracket.hi - x < edge) {
    std::ostringstream msg;
    msg << "no interior minimum of '" << h.key << "' in [" << bracket.lo << ", " << bracket.hi
        << "]";
    throw PreconditionError(msg.str());
  }
  return x;
}

double a_naught(std::span<const HamiltonianSpec> hams) {
  if (hams.empty()) throw PreconditionError("a_naught needs at least one hamiltonian");
  double a0 = -kInf;
  for (const auto& h : hams) {
    require_section5(h);
    a0 = std::max(a0, h(*h.p0));
  }
  return a0;
}

double p_A(const HamiltonianSpec& h, double A) {
  require_section5(h);
  const double p0 = *h.p0;
  const double floor = h(p0);
  if (A < floor - 1e-12 * (1.0 + std::abs(floor))) {
    std::ostringstream msg;
    msg << "flux limiter A=" << A << " is below min H = " << floor << " for '" << h.key << "'";
    throw PreconditionError(msg.str());
  }
  if (A <= floor) return p0;
  double step = 1.0;
  double hi = p0 + step;
  while (h(hi) < A) {
    step *= 2.0;
    hi = p0 + step;
    if (!std::isfinite(hi)) throw NumericFailure("p_A: could not bracket the level set");
  }
  double lo = p0;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid) < A ? lo : hi) = mid;
  }
  return std::abs(h(lo) - A) < std::abs(h(hi) - A) ? lo : hi;
}

double a_to_b(std::span<const HamiltonianSpec> hams, double A) {
  const double a0 = a_naught(hams);
  if (A < a0) {
    std::ostringstream msg;
    msg << "flux limiter A=" << A << " is below A0=" << a0;
    throw PreconditionError(msg.str());
  }
  double sum = 0.0;
  for (const auto& h : hams) sum += p_A(h, A);
  return -sum;
}

HamiltonianSpec reflect(const HamiltonianSpec& h) {
  HamiltonianSpec r = h;
  auto inner = h.eval;
  r.eval = [inner](double p, double x, double t) { return inner(-p, -x, t); };
  if (h.p0) r.p0 = -*h.p0;
  if (h.lipschitz_p) {
    auto lip = h.lipschitz_p;
    r.lipschitz_p = [lip](SlopeRange s) { return lip(SlopeRange{-s.hi, -s.lo}); };
  }
  if (h.legendre) {
    auto leg = h.legendre;
    r.legendre = [leg](double v) { return leg(-v); };
  }
  return r;
}

double legendre_numeric(const HamiltonianSpec& h, double v, double R) {
  auto neg = [&](double p) { return h(p) - p * v; };
  const double p = golden_min(neg, -R, R, 1e-12);
  return p * v - h(p);
}

}  // namespace hjnet
