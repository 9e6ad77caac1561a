// Serial reference vs OpenMP kernels: interior sweep and arrowhead solve.
// Usage: bench_kernels [nodes_per_branch] [branches] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <omp.h>

#include "hjnet/detail/random.hpp"
#include "hjnet/evolve.hpp"
#include "hjnet/viscous.hpp"

using namespace hjnet;

namespace {

template <class F>
double best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s < best) best = s;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 200000;
  const std::size_t K = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 4;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 5;

  const double dx = 1.0 / static_cast<double>(n);
  const Grid grid = build_grid(JunctionNetwork::uniform(K, 1.0), dx);
  detail::Rng rng(7);
  GridFunction u = GridFunction::zeros(grid);
  for (auto& b : u.values)
    for (auto& v : b) v = rng.uniform(-1.0, 1.0) * 1e-3;

  std::vector<NumericalFlux> fluxes;
  for (std::size_t i = 0; i < K; ++i)
    fluxes.push_back(NumericalFlux::lax_friedrichs(catalog::quadratic(0.5, 0.0, 0.0), 3.0));
  const double dt = 0.4 * dx / 3.0;

  std::printf("threads=%d  branches=%zu  nodes/branch=%zu  repeats=%d\n", omp_get_max_threads(), K,
              grid.nodes(0), repeats);

  GridFunction a, b;
  const double ts = best_of(repeats, [&] { a = interior_step_serial(grid, u, fluxes, dt, 0.0); });
  const double tp = best_of(repeats, [&] { b = interior_step(grid, u, fluxes, dt, 0.0); });
  std::printf("interior_step    serial %.4fs  openmp %.4fs  speedup %.2f  identical=%s\n", ts, tp,
              ts / tp, a == b ? "yes" : "no");

  const ArrowheadSystem sys = assemble(grid, 0.05, dt, u, 0.0);
  GridFunction x, y;
  const double ss = best_of(repeats, [&] { x = arrowhead_solve_serial(sys); });
  const double sp = best_of(repeats, [&] { y = arrowhead_solve(sys); });
  std::printf("arrowhead_solve  serial %.4fs  openmp %.4fs  speedup %.2f  max|diff|=%.3g\n", ss,
              sp, ss / sp, sup_distance(x, y));
  return 0;
}
