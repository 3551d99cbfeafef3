// Benchmark comparing the serial reference kernels against the OpenMP ones.
// Exploration must produce identical graphs for every worker count, so each
// row also cross-checks the state and transition totals.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ringcheck/simulate.hpp"
#include "ringcheck/statespace.hpp"

using namespace ringcheck;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int max_workers() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void bench_explore(Variant variant, int n) {
  std::vector<int> uids(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) uids[static_cast<size_t>(i)] = i;

  auto t0 = std::chrono::steady_clock::now();
  auto [serial_graph, serial_stats] = explore_serial(variant, uids);
  double serial_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  auto [par_graph, par_stats] = explore_parallel(variant, uids, {}, max_workers());
  double par_s = seconds_since(t0);

  bool same = serial_graph.arena == par_graph.arena && serial_graph.edges == par_graph.edges;
  std::printf("explore  %-8s n=%d  states=%-9llu serial=%7.3fs  omp(%d)=%7.3fs  speedup=%4.2fx  %s\n",
              variant_name(variant), n,
              static_cast<unsigned long long>(serial_stats.reachable_states), serial_s,
              max_workers(), par_s, serial_s / (par_s > 0 ? par_s : 1e-9),
              same ? "identical" : "MISMATCH");
  if (!same) std::exit(1);
}

void bench_sweep() {
  std::vector<Variant> variants = {Variant::General, Variant::Modified, Variant::ExtraModified};
  std::vector<int> n_range;
  for (int n = 2; n <= 10; ++n) n_range.push_back(n);
  const int runs = 100;

  auto t0 = std::chrono::steady_clock::now();
  auto serial_rows = sweep(variants, n_range, runs, 7, 1);
  double serial_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  auto par_rows = sweep(variants, n_range, runs, 7, max_workers());
  double par_s = seconds_since(t0);

  bool same = serial_rows.size() == par_rows.size();
  for (size_t i = 0; same && i < serial_rows.size(); ++i) {
    same = sweep_row_csv(serial_rows[i]) == sweep_row_csv(par_rows[i]);
  }
  std::printf("sweep    3 variants n=2..10 runs=%d        serial=%7.3fs  omp(%d)=%7.3fs  speedup=%4.2fx  %s\n",
              runs, serial_s, max_workers(), par_s, serial_s / (par_s > 0 ? par_s : 1e-9),
              same ? "identical" : "MISMATCH");
  if (!same) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
  int big_n = argc > 1 ? std::atoi(argv[1]) : 9;
  bench_explore(Variant::Modified, 6);
  bench_explore(Variant::ExtraModified, 8);
  bench_explore(Variant::General, big_n);
  bench_sweep();
  return 0;
}
