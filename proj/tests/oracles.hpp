// Independent reference computations for the tests. Nothing here calls into the
// library's numerics.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hjnet/viscous.hpp"

namespace oracle {

// Ternary search for the minimum of a unimodal f on [lo, hi].
inline double local_min(const std::function<double(double)>& f, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return f(0.5 * (lo + hi));
}

// Godunov flux by definition: min of H over [p-, p+] when p- <= p+, max over
// [p+, p-] otherwise. Dense sampling, then a local refinement of the best cell.
inline double godunov_minimax(const std::function<double(double)>& H, double pm, double pp,
                              int samples = 10000) {
  const double lo = std::min(pm, pp), hi = std::max(pm, pp);
  if (lo == hi) return H(lo);
  const bool take_min = pm <= pp;
  const double sgn = take_min ? 1.0 : -1.0;
  const auto g = [&](double p) { return sgn * H(p); };
  const double h = (hi - lo) / samples;
  int best = 0;
  double bv = g(lo);
  for (int k = 1; k <= samples; ++k) {
    const double v = g(k == samples ? hi : lo + k * h);
    if (v < bv) {
      bv = v;
      best = k;
    }
  }
  const double a = lo + std::max(0, best - 1) * h;
  const double b = std::min(hi, lo + (best + 1) * h);
  return sgn * std::min(bv, local_min(g, a, b));
}

// Dense Gaussian elimination with partial pivoting on the assembled arrowhead
// matrix. Unknown order: z, then branch 1 nodes, branch 2 nodes, ...
inline hjnet::GridFunction dense_solve(const hjnet::ArrowheadSystem& sys) {
  std::size_t n = 1;
  std::vector<std::size_t> offset;
  for (const auto& b : sys.blocks) {
    offset.push_back(n);
    n += b.size();
  }
  std::vector<std::vector<double>> M(n, std::vector<double>(n + 1, 0.0));
  M[0][0] = sys.junction_diag;
  M[0][n] = sys.junction_rhs;
  for (std::size_t i = 0; i < sys.blocks.size(); ++i) {
    const auto& b = sys.blocks[i];
    for (std::size_t k = 0; k < b.size(); ++k) {
      const std::size_t r = offset[i] + k;
      M[0][r] = b.junction_row[k];
      M[r][0] = b.coupling[k];
      M[r][r] = b.diag[k];
      if (k > 0) M[r][r - 1] = b.lower[k];
      if (k + 1 < b.size()) M[r][r + 1] = b.upper[k];
      M[r][n] = b.rhs[k];
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
    if (M[piv][c] == 0.0) throw std::runtime_error("singular");
    std::swap(M[c], M[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = M[r][c] / M[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k <= n; ++k) M[r][k] -= f * M[c][k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t c = n; c-- > 0;) {
    double s = M[c][n];
    for (std::size_t k = c + 1; k < n; ++k) s -= M[c][k] * x[k];
    x[c] = s / M[c][c];
  }
  hjnet::GridFunction u;
  u.junction = x[0];
  for (std::size_t i = 0; i < sys.blocks.size(); ++i)
    u.values.emplace_back(x.begin() + offset[i], x.begin() + offset[i] + sys.blocks[i].size());
  return u;
}

// u_t + u_y^2 / 2 = 0, u(y, 0) = |y|.
inline double hopf_lax_abs(double y, double t) {
  const double a = std::abs(y);
  return a <= t ? y * y / (2.0 * t) : a - 0.5 * t;
}

inline double log_normal_cdf(double x) { return std::log(0.5 * std::erfc(-x / std::sqrt(2.0))); }

// Cole-Hopf solution of u_t - eps u_yy + u_y^2 / 2 = 0, u(y, 0) = |y|:
// u = -2 eps log w with w the heat flow of exp(-|y| / (2 eps)).
inline double cole_hopf_abs(double y, double t, double eps) {
  const double a = 1.0 / (2.0 * eps);
  const double s = std::sqrt(2.0 * eps * t);
  const double l1 = -a * y + log_normal_cdf((y - a * s * s) / s);
  const double l2 = a * y + log_normal_cdf((-y - a * s * s) / s);
  const double m = std::max(l1, l2);
  const double log_w = a * a * s * s / 2.0 + m + std::log(std::exp(l1 - m) + std::exp(l2 - m));
  return -2.0 * eps * log_w;
}

}  // namespace oracle
