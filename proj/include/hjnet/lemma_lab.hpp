#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hjnet/hamiltonians.hpp"

namespace hjnet::lemma {

/// Half-open slope interval used by the violation boxes; `empty` when lo >= hi.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = false;
};

/// Worst value of one junction inequality over its quantified slope set.
///
/// Sub side:   margin = sup_{p' <= upper} min(sum p' - offset, min_i(level + H_i(p'_i)))
/// Super side: margin = -inf_{q' >= lower} max(sum q' - offset, max_i(level + H_i(q'_i)))
///
/// In both cases margin <= 0 means the inequality holds; the witness is the
/// slope tuple attaining the reported margin.
struct SideCheck {
  double margin = 0.0;
  std::vector<double> witness;
  std::vector<Interval> box;
  bool vacuous = false;  // some box is empty, so no violating tuple exists
};

/// Compact region outside of which the sub side cannot be violated.
///
/// A violation needs sum p' > offset with p'_j <= upper_j for every j, which forces
/// p'_i > offset - sum_{j != i} upper_j. Hence every violating tuple lies in
/// prod_i (offset - sum_{j != i} upper_j, upper_i].
std::vector<Interval> sub_violation_box(std::span<const double> upper, double offset);
/// Dual region prod_i [lower_i, offset - sum_{j != i} lower_j) for the super side.
std::vector<Interval> super_violation_box(std::span<const double> lower, double offset);

/// Dense sampling of the violation box, refined by an exact level-set
/// bisection when every H_i is convex with a known argmin.
SideCheck sub_side(std::span<const HamiltonianSpec> h, std::span<const double> upper, double level,
                   double offset, double t, std::size_t density, bool refine = true);
SideCheck super_side(std::span<const HamiltonianSpec> h, std::span<const double> lower,
                     double level, double offset, double t, std::size_t density,
                     bool refine = true);

/// (H_1..H_K, p, q, a, b) for the junction comparison lemma, with the H_i frozen
/// at x = 0 and time t.
struct LemmaInstance {
  std::vector<HamiltonianSpec> h;
  std::vector<double> p;
  std::vector<double> q;
  double a = 0.0;
  double b = 0.0;
  double t = 0.0;

  std::size_t branches() const { return h.size(); }
};

struct ViolationBoxes {
  std::vector<Interval> sub;    // condition (ii)
  std::vector<Interval> super;  // condition (iii)
};

ViolationBoxes violation_box(const LemmaInstance& inst);

struct HypothesisReport {
  bool cond_i_ok = false;
  double cond_i_margin = 0.0;
  bool cond_ii_ok = false;
  double cond_ii_margin = 0.0;
  std::vector<double> cond_ii_witness;
  bool cond_iii_ok = false;
  double cond_iii_margin = 0.0;
  std::vector<double> cond_iii_witness;
  ViolationBoxes boxes;
  std::size_t density = 0;

  bool all_ok() const { return cond_i_ok && cond_ii_ok && cond_iii_ok; }
};

/// 101 points per axis for K <= 3, 21 for K <= 6, coarser beyond.
std::size_t default_density(std::size_t K);

HypothesisReport check_hypotheses(const LemmaInstance& inst, std::size_t density, double tol,
                                  bool refine = true);

inline bool conclusion_holds(const LemmaInstance& inst) { return inst.a <= inst.b; }

struct GeneratorParams {
  double curvature_min = 0.2;
  double curvature_max = 3.0;
  double center_spread = 2.0;
  double floor_spread = 1.0;
  int max_rejections = 1000;
  std::size_t density = 0;  // 0: default_density(K)
};

/// Random quadratic instance satisfying (i)-(iii), verified by check_hypotheses.
LemmaInstance random_satisfying_instance(std::uint64_t seed, std::size_t K,
                                         const GeneratorParams& params = {});

struct AdversarialResult {
  LemmaInstance best;
  HypothesisReport report;
  double gap = 0.0;  // a - b
  bool feasible = false;
  std::size_t evaluations = 0;
};

/// Random restarts plus local moves that try to push a - b above zero while
/// keeping every hypothesis satisfied. `budget` counts hypothesis checks.
AdversarialResult adversarial_search(std::uint64_t seed, std::size_t K, std::size_t budget,
                                     const GeneratorParams& params = {});

/// Brute-force sampling on [p_i - width, p_i] and [q_i, q_i + width].
struct WideScan {
  bool sub_violated = false;
  bool super_violated = false;
  bool violation_outside_box = false;
  double sub_margin = 0.0;
  double super_margin = 0.0;
};

WideScan wide_box_scan(const LemmaInstance& inst, double width, std::size_t density, double tol);

}  // namespace hjnet::lemma
