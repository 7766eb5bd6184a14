// Timing harness comparing the OpenMP Husimi kernel against the serial
// reference, plus split-operator step throughput. Not part of ctest.

#include <chrono>
#include <cstdio>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ehrenfest/husimi.hpp"
#include "ehrenfest/propagators.hpp"
#include "ehrenfest/wavefunction.hpp"

using namespace ehrenfest;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

int main() {
  const double hbar = 1e-3;
  GridSpec grid{-2.0, 2.0, 4096};

  // A delocalized double-well state makes a realistic Husimi workload.
  auto psi0 = make_coherent_state(grid, hbar, 0.0, 0.0);
  auto record = evolve_split_operator(psi0, PotentialSpec::double_well(), 1e-3, 2442, 0);
  const Wavefunction& psi = record.final_state();

  auto qs = uniform_lattice(-1.4, 1.4, 256);
  auto ps = uniform_lattice(-1.1, 1.1, 200);

#ifdef _OPENMP
  int max_threads = omp_get_max_threads();
#else
  int max_threads = 1;
#endif

  std::printf("husimi lattice %zu x %zu, grid n=%zu\n", qs.size(), ps.size(), grid.n);

  auto t0 = clock_type::now();
  auto ref = husimi_reference(psi, qs, ps);
  double t_ref = seconds_since(t0);
  std::printf("  reference (full grid, serial)   %8.3f s\n", t_ref);

#ifdef _OPENMP
  omp_set_num_threads(1);
#endif
  t0 = clock_type::now();
  auto serial = husimi(psi, qs, ps);
  double t_serial = seconds_since(t0);
  std::printf("  windowed kernel, 1 thread       %8.3f s  (%.1fx vs reference)\n", t_serial,
              t_ref / t_serial);

#ifdef _OPENMP
  omp_set_num_threads(max_threads);
#endif
  t0 = clock_type::now();
  auto parallel = husimi(psi, qs, ps);
  double t_parallel = seconds_since(t0);
  std::printf("  windowed kernel, %d threads      %8.3f s  (%.2fx vs 1 thread)\n", max_threads,
              t_parallel, t_serial / t_parallel);

  double worst = 0.0;
  for (std::size_t i = 0; i < ref.values.size(); ++i)
    worst = std::max(worst, std::abs(ref.values[i] - parallel.values[i]));
  std::printf("  max |kernel - reference|        %8.2e\n", worst);
  std::printf("  total mass %.6f (reference %.6f)\n", parallel.total_mass(), ref.total_mass());

  t0 = clock_type::now();
  auto long_run = evolve_split_operator(psi0, PotentialSpec::double_well(), 1e-3, 2000, 0);
  double t_steps = seconds_since(t0);
  std::printf("split-operator: %.0f steps/s at n=%zu (norm %.12f)\n", 2000.0 / t_steps, grid.n,
              long_run.norms.back());
  return 0;
}
