#include "hjnet/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "hjnet/detail/random.hpp"
#include "hjnet/network.hpp"

namespace hjnet::lemma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sum_except(std::span<const double> v, std::size_t i) {
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    if (j != i) s += v[j];
  return s;
}

bool all_convex(std::span<const HamiltonianSpec> h) {
  return std::all_of(h.begin(), h.end(), [](const auto& hi) { return hi.convex_in_p && hi.p0; });
}

double sub_value(std::span<const HamiltonianSpec> h, std::span<const double> p, double level,
                 double offset, double t) {
  double sum = 0.0, m = kInf;
  for (std::size_t i = 0; i < h.size(); ++i) {
    sum += p[i];
    m = std::min(m, level + h[i](p[i], 0.0, t));
  }
  return std::min(sum - offset, m);
}

double super_value(std::span<const HamiltonianSpec> h, std::span<const double> q, double level,
                   double offset, double t) {
  double sum = 0.0, m = -kInf;
  for (std::size_t i = 0; i < h.size(); ++i) {
    sum += q[i];
    m = std::max(m, level + h[i](q[i], 0.0, t));
  }
  return std::max(sum - offset, m);
}

struct Axis {
  std::vector<double> slope;
  std::vector<double> value;  // level + H_i(slope)
};

Axis make_axis(const HamiltonianSpec& h, double lo, double hi, std::size_t density, double level,
               double t) {
  Axis ax;
  const std::size_t n = lo == hi ? 1 : density;
  ax.slope.resize(n);
  ax.value.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = n == 1 ? hi : lo + (hi - lo) * static_cast<double>(k) / (n - 1);
    ax.slope[k] = s;
    ax.value[k] = level + h(s, 0.0, t);
  }
  return ax;
}

struct ScanResult {
  double best = -kInf;  // maximised objective
  std::size_t index = 0;
};

// Exhaustive scan over the tensor grid of axes. For the sub side the objective is
// min(sum - offset, min value); for the super side it is -max(sum - offset, max value),
// so both sides maximise. Ties resolve to the lowest flat index.
ScanResult scan_tensor(const std::vector<Axis>& axes, double offset, bool sub) {
  const std::size_t K = axes.size();
  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.slope.size();

  ScanResult global;
  global.index = total;
#pragma omp parallel
  {
    ScanResult local;
    local.index = total;
    std::vector<std::size_t> digit(K);
#pragma omp for schedule(static)
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t r = flat;
      for (std::size_t i = 0; i < K; ++i) {
        digit[i] = r % axes[i].slope.size();
        r /= axes[i].slope.size();
      }
      double sum = 0.0;
      double ext = sub ? kInf : -kInf;
      for (std::size_t i = 0; i < K; ++i) {
        sum += axes[i].slope[digit[i]];
        const double v = axes[i].value[digit[i]];
        ext = sub ? std::min(ext, v) : std::max(ext, v);
      }
      const double obj = sub ? std::min(sum - offset, ext) : -std::max(sum - offset, ext);
      if (obj > local.best || (obj == local.best && flat < local.index)) {
        local.best = obj;
        local.index = flat;
      }
    }
#pragma omp critical(hjnet_lemma_scan)
    {
      if (local.best > global.best || (local.best == global.best && local.index < global.index))
        global = local;
    }
  }
  return global;
}

std::vector<double> decode(const std::vector<Axis>& axes, std::size_t flat) {
  std::vector<double> out(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    out[i] = axes[i].slope[flat % axes[i].slope.size()];
    flat /= axes[i].slope.size();
  }
  return out;
}

// Largest s <= start with H(s) >= level, for convex H with H(start) < level.
double left_crossing(const HamiltonianSpec& h, double t, double start, double level) {
  double step = 1e-3 * (1.0 + std::abs(start));
  double lo = start - step;
  double hi = start;
  while (h(lo, 0.0, t) < level) {
    hi = lo;
    step *= 2.0;
    lo = start - step;
    if (!std::isfinite(lo)) throw NumericFailure("level set of a hamiltonian is unbounded");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid, 0.0, t) >= level ? lo : hi) = mid;
  }
  return lo;
}

// Smallest s >= start with H(s) <= level, for convex H with argmin p0.
std::optional<double> right_sublevel(const HamiltonianSpec& h, double t, double start,
                                     double level) {
  if (h(start, 0.0, t) <= level) return start;
  const double p0 = *h.p0;
  if (start >= p0 || h(p0, 0.0, t) > level) return std::nullopt;
  double lo = start, hi = p0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid, 0.0, t) <= level ? hi : lo) = mid;
  }
  return hi;
}

// sup f over the whole quadrant p' <= upper: the largest lambda such that the
// per-branch superlevel sets {s <= upper_i : level + H_i(s) >= lambda} still admit
// a tuple with sum >= lambda + offset. Separable, so a scalar bisection suffices.
std::vector<double> exact_sub_witness(std::span<const HamiltonianSpec> h,
                                      std::span<const double> upper, double level, double offset,
                                      double t) {
  const std::size_t K = h.size();
  auto tuple_for = [&](double lambda) {
    std::vector<double> m(K);
    for (std::size_t i = 0; i < K; ++i) {
      const double ell = lambda - level;
      m[i] = h[i](upper[i], 0.0, t) >= ell ? upper[i] : left_crossing(h[i], t, upper[i], ell);
    }
    return m;
  };
  auto feasible = [&](const std::vector<double>& m, double lambda) {
    return std::accumulate(m.begin(), m.end(), 0.0) >= lambda + offset;
  };
  double lo = sub_value(h, upper, level, offset, t);
  double hi = std::accumulate(upper.begin(), upper.end(), 0.0) - offset;
  std::vector<double> best(upper.begin(), upper.end());
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    auto m = tuple_for(mid);
    if (feasible(m, mid)) {
      lo = mid;
      best = std::move(m);
    } else {
      hi = mid;
    }
  }
  return best;
}

std::optional<std::vector<double>> exact_super_witness(std::span<const HamiltonianSpec> h,
                                                       std::span<const double> lower,
                                                       double level, double offset, double t) {
  const std::size_t K = h.size();
  auto tuple_for = [&](double lambda) -> std::optional<std::vector<double>> {
    std::vector<double> n(K);
    for (std::size_t i = 0; i < K; ++i) {
      auto s = right_sublevel(h[i], t, lower[i], lambda - level);
      if (!s) return std::nullopt;
      n[i] = *s;
    }
    if (std::accumulate(n.begin(), n.end(), 0.0) > lambda + offset) return std::nullopt;
    return n;
  };
  double hi = super_value(h, lower, level, offset, t);
  double lo = -kInf;
  for (std::size_t i = 0; i < K; ++i)
    lo = std::max(lo, level + h[i](std::max(lower[i], *h[i].p0), 0.0, t));
  std::vector<double> best(lower.begin(), lower.end());
  if (lo >= hi) return best;
  if (auto n = tuple_for(lo)) return n;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (auto n = tuple_for(mid)) {
      hi = mid;
      best = std::move(*n);
    } else {
      lo = mid;
    }
  }
  return best;
}

void require_sizes(std::span<const HamiltonianSpec> h, std::span<const double> v) {
  if (h.empty() || h.size() != v.size())
    throw PreconditionError("need one slope per hamiltonian and at least one branch");
}

}  // namespace

std::vector<Interval> sub_violation_box(std::span<const double> upper, double offset) {
  std::vector<Interval> box(upper.size());
  for (std::size_t i = 0; i < upper.size(); ++i) {
    box[i].lo = offset - sum_except(upper, i);
    box[i].hi = upper[i];
    box[i].empty = box[i].lo >= box[i].hi;
  }
  return box;
}

std::vector<Interval> super_violation_box(std::span<const double> lower, double offset) {
  std::vector<Interval> box(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) {
    box[i].lo = lower[i];
    box[i].hi = offset - sum_except(lower, i);
    box[i].empty = box[i].lo >= box[i].hi;
  }
  return box;
}

SideCheck sub_side(std::span<const HamiltonianSpec> h, std::span<const double> upper, double level,
                   double offset, double t, std::size_t density, bool refine) {
  require_sizes(h, upper);
  SideCheck out;
  out.box = sub_violation_box(upper, offset);
  out.vacuous = std::any_of(out.box.begin(), out.box.end(), [](auto& b) { return b.empty; });
  out.witness.assign(upper.begin(), upper.end());
  out.margin = sub_value(h, upper, level, offset, t);

  if (!out.vacuous) {
    std::vector<Axis> axes;
    for (std::size_t i = 0; i < h.size(); ++i)
      axes.push_back(make_axis(h[i], out.box[i].lo, out.box[i].hi, density, level, t));
    const auto scan = scan_tensor(axes, offset, true);
    if (scan.best > out.margin) {
      out.margin = scan.best;
      out.witness = decode(axes, scan.index);
    }
  }
  if (refine && all_convex(h)) {
    auto w = exact_sub_witness(h, upper, level, offset, t);
    const double v = sub_value(h, w, level, offset, t);
    if (v > out.margin) {
      out.margin = v;
      out.witness = std::move(w);
    }
  }
  return out;
}

SideCheck super_side(std::span<const HamiltonianSpec> h, std::span<const double> lower,
                     double level, double offset, double t, std::size_t density, bool refine) {
  require_sizes(h, lower);
  SideCheck out;
  out.box = super_violation_box(lower, offset);
  out.vacuous = std::any_of(out.box.begin(), out.box.end(), [](auto& b) { return b.empty; });
  out.witness.assign(lower.begin(), lower.end());
  out.margin = -super_value(h, lower, level, offset, t);

  if (!out.vacuous) {
    std::vector<Axis> axes;
    for (std::size_t i = 0; i < h.size(); ++i)
      axes.push_back(make_axis(h[i], out.box[i].lo, out.box[i].hi, density, level, t));
    const auto scan = scan_tensor(axes, offset, false);
    if (scan.best > out.margin) {
      out.margin = scan.best;
      out.witness = decode(axes, scan.index);
    }
  }
  if (refine && all_convex(h)) {
    if (auto w = exact_super_witness(h, lower, level, offset, t)) {
      const double v = -super_value(h, *w, level, offset, t);
      if (v > out.margin) {
        out.margin = v;
        out.witness = std::move(*w);
      }
    }
  }
  return out;
}

ViolationBoxes violation_box(const LemmaInstance& inst) {
  return {sub_violation_box(inst.p, 0.0), super_violation_box(inst.q, 0.0)};
}

std::size_t default_density(std::size_t K) {
  if (K <= 3) return 101;
  if (K <= 6) return 21;
  return std::max<std::size_t>(3, static_cast<std::size_t>(std::pow(1e7, 1.0 / K)));
}

HypothesisReport check_hypotheses(const LemmaInstance& inst, std::size_t density, double tol,
                                  bool refine) {
  const std::size_t K = inst.branches();
  if (K == 0 || inst.p.size() != K || inst.q.size() != K)
    throw PreconditionError("lemma instance needs K >= 1 and K entries in p and q");
  if (density < 11) throw PreconditionError("sampling density must be at least 11 per axis");

  HypothesisReport rep;
  rep.density = density;
  rep.boxes = violation_box(inst);

  double m1 = -kInf;
  for (std::size_t i = 0; i < K; ++i) {
    m1 = std::max(m1, inst.q[i] - inst.p[i]);
    m1 = std::max(m1, inst.a + inst.h[i](inst.p[i], 0.0, inst.t));
    m1 = std::max(m1, -(inst.b + inst.h[i](inst.q[i], 0.0, inst.t)));
  }
  rep.cond_i_margin = m1;
  rep.cond_i_ok = m1 <= tol;

  auto ii = sub_side(inst.h, inst.p, inst.a, 0.0, inst.t, density, refine);
  rep.cond_ii_margin = ii.margin;
  rep.cond_ii_ok = ii.margin <= tol;
  rep.cond_ii_witness = std::move(ii.witness);

  auto iii = super_side(inst.h, inst.q, inst.b, 0.0, inst.t, density, refine);
  rep.cond_iii_margin = iii.margin;
  rep.cond_iii_ok = iii.margin <= tol;
  rep.cond_iii_witness = std::move(iii.witness);
  return rep;
}

namespace {

struct Draw {
  LemmaInstance inst;
  std::vector<double> curvature, center, floor;
};

Draw draw_quadratics(detail::Rng& rng, std::size_t K, const GeneratorParams& gp) {
  Draw d;
  for (std::size_t i = 0; i < K; ++i) {
    d.curvature.push_back(rng.uniform(gp.curvature_min, gp.curvature_max));
    d.center.push_back(rng.uniform(-gp.center_spread, gp.center_spread));
    d.floor.push_back(rng.uniform(-gp.floor_spread, gp.floor_spread));
    d.inst.h.push_back(catalog::quadratic(d.curvature.back(), d.center.back(), d.floor.back()));
  }
  return d;
}

// Candidate whose condition (i) holds by construction; (ii) and (iii) are left
// to the checker.
LemmaInstance draw_candidate(detail::Rng& rng, std::size_t K, const GeneratorParams& gp) {
  auto d = draw_quadratics(rng, K, gp);
  auto& inst = d.inst;
  const double top = *std::max_element(d.floor.begin(), d.floor.end());
  inst.a = -top - rng.uniform(0.05, 3.0);
  inst.p.resize(K);
  inst.q.resize(K);
  for (std::size_t i = 0; i < K; ++i) {
    const double r = std::sqrt((-inst.a - d.floor[i]) / d.curvature[i]);
    inst.p[i] = rng.uniform(d.center[i] - r, d.center[i] + r);
    inst.q[i] = inst.p[i] - rng.uniform(0.0, 1.5);
  }
  double hq = kInf;
  for (std::size_t i = 0; i < K; ++i) hq = std::min(hq, inst.h[i](inst.q[i]));
  inst.b = -hq + rng.uniform(0.0, 1.0);
  return inst;
}

bool quick_pass(const LemmaInstance& inst) {
  // Exact level-set margins only; the sampled check is run once at the end.
  auto ii = sub_side(inst.h, inst.p, inst.a, 0.0, inst.t, 11, true);
  if (ii.margin > 0.0) return false;
  auto iii = super_side(inst.h, inst.q, inst.b, 0.0, inst.t, 11, true);
  return iii.margin <= 0.0;
}

}  // namespace

LemmaInstance random_satisfying_instance(std::uint64_t seed, std::size_t K,
                                         const GeneratorParams& params) {
  if (K == 0) throw PreconditionError("K must be at least 1");
  detail::Rng rng(seed);
  const std::size_t density = params.density ? params.density : default_density(K);
  for (int attempt = 0; attempt < params.max_rejections; ++attempt) {
    auto inst = draw_candidate(rng, K, params);
    if (!quick_pass(inst)) continue;
    if (check_hypotheses(inst, density, 0.0).all_ok()) return inst;
  }
  std::ostringstream msg;
  msg << "no hypothesis-satisfying instance after " << params.max_rejections
      << " draws (seed=" << seed << ", K=" << K << ", curvature=[" << params.curvature_min << ", "
      << params.curvature_max << "], center_spread=" << params.center_spread
      << ", floor_spread=" << params.floor_spread << ")";
  throw NumericFailure(msg.str());
}

AdversarialResult adversarial_search(std::uint64_t seed, std::size_t K, std::size_t budget,
                                     const GeneratorParams& params) {
  if (budget == 0) throw PreconditionError("adversarial search needs a budget of at least 1");
  const std::size_t density = params.density ? params.density : default_density(K);
  detail::Rng rng(seed);
  AdversarialResult result;
  result.gap = -kInf;

  while (result.evaluations < budget) {
    auto current = random_satisfying_instance(rng.next(), K, params);
    auto report = check_hypotheses(current, density, 0.0);
    ++result.evaluations;
    if (!result.feasible || current.a - current.b > result.gap) {
      result.best = current;
      result.report = report;
      result.gap = current.a - current.b;
      result.feasible = true;
    }

    // Hill climb on (a, b, p, q): keep a move when the hypotheses survive and a - b
    // does not shrink. Step size halves after a run of rejected moves.
    double step = 0.5;
    int rejected = 0;
    const int moves_per_restart = 60;
    for (int move = 0; move < moves_per_restart && result.evaluations < budget; ++move) {
      auto trial = current;
      trial.a += step * rng.uniform(0.0, 1.0);
      trial.b -= step * rng.uniform(0.0, 1.0);
      for (std::size_t i = 0; i < K; ++i) {
        trial.p[i] += step * rng.uniform(-1.0, 1.0);
        trial.q[i] += step * rng.uniform(-1.0, 1.0);
      }
      auto rep = check_hypotheses(trial, density, 0.0);
      ++result.evaluations;
      if (rep.all_ok() && trial.a - trial.b >= current.a - current.b) {
        current = std::move(trial);
        rejected = 0;
        if (current.a - current.b > result.gap) {
          result.best = current;
          result.report = rep;
          result.gap = current.a - current.b;
        }
      } else if (++rejected >= 4) {
        step *= 0.5;
        rejected = 0;
      }
    }
  }
  return result;
}

WideScan wide_box_scan(const LemmaInstance& inst, double width, std::size_t density,
                       double tol) {
  const std::size_t K = inst.branches();
  const auto boxes = violation_box(inst);
  WideScan out;
  out.sub_margin = -kInf;
  out.super_margin = -kInf;

  std::vector<Axis> sub_axes, super_axes;
  for (std::size_t i = 0; i < K; ++i) {
    sub_axes.push_back(make_axis(inst.h[i], inst.p[i] - width, inst.p[i], density, inst.a, inst.t));
    super_axes.push_back(
        make_axis(inst.h[i], inst.q[i], inst.q[i] + width, density, inst.b, inst.t));
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < K; ++i) total *= density;

  bool sub_v = false, super_v = false, outside = false;
  double sub_m = -kInf, super_m = -kInf;
  const double slack = 1e-12;
#pragma omp parallel for schedule(static) reduction(|| : sub_v, super_v, outside) \
    reduction(max : sub_m, super_m)
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    double ssum = 0.0, smin = kInf, qsum = 0.0, qmax = -kInf;
    bool sub_inside = true, super_inside = true;
    for (std::size_t i = 0; i < K; ++i) {
      const std::size_t k = r % density;
      r /= density;
      const double ps = sub_axes[i].slope[k];
      ssum += ps;
      smin = std::min(smin, sub_axes[i].value[k]);
      if (ps <= boxes.sub[i].lo - slack) sub_inside = false;
      const double qs = super_axes[i].slope[k];
      qsum += qs;
      qmax = std::max(qmax, super_axes[i].value[k]);
      if (qs >= boxes.super[i].hi + slack) super_inside = false;
    }
    const double f = std::min(ssum, smin);
    const double g = -std::max(qsum, qmax);
    sub_m = std::max(sub_m, f);
    super_m = std::max(super_m, g);
    if (f > tol) {
      sub_v = true;
      if (!sub_inside) outside = true;
    }
    if (g > tol) {
      super_v = true;
      if (!super_inside) outside = true;
    }
  }
  out.sub_violated = sub_v;
  out.super_violated = super_v;
  out.violation_outside_box = outside;
  out.sub_margin = sub_m;
  out.super_margin = super_m;
  return out;
}

}  // namespace hjnet::lemma
