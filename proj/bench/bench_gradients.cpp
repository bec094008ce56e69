// Serial reference vs OpenMP for the per-release sensitivity integrations and
// the finite-difference oracle. Usage: bench_gradients [repeats]
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "vecctl/gradients.hpp"

using namespace vecctl;

namespace {

template <class F>
double best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
  const EpiParams q = EpiParams::dengue();
  std::printf("threads %d, best of %d\n", omp_get_max_threads(), repeats);
  std::printf("%-6s %4s %-12s %12s %12s %8s %12s\n", "model", "n", "kernel", "serial_ms", "openmp_ms",
              "speedup", "max_diff");
  for (ModelKind model : {ModelKind::sit, ModelKind::wb}) {
    for (std::size_t n : {1u, 10u, 20u}) {
      const double budget = model == ModelKind::sit ? 3e7 : 1e4;
      const auto s = random_schedule(n, budget, 450.0, 11);

      GradientReport a;
      GradientReport b;
      const double ts = best_of(repeats, [&] { a = grad_J(model, q, s, {}, Parallelism::serial); });
      const double tp = best_of(repeats, [&] { b = grad_J(model, q, s, {}, Parallelism::openmp); });
      std::printf("%-6s %4zu %-12s %12.3f %12.3f %8.2f %12.3g\n", std::string(model_name(model)).c_str(), n,
                  "variational", ts, tp, ts / tp, gradient_mismatch(a, b, 0.0, 1.0));

      const FdOptions fd;
      const double fs = best_of(1, [&] { a = grad_J_fd(model, q, s, fd, Parallelism::serial); });
      const double fp = best_of(1, [&] { b = grad_J_fd(model, q, s, fd, Parallelism::openmp); });
      std::printf("%-6s %4zu %-12s %12.3f %12.3f %8.2f %12.3g\n", std::string(model_name(model)).c_str(), n,
                  "fd-oracle", fs, fp, fs / fp, gradient_mismatch(a, b, 0.0, 1.0));
    }
  }
  return 0;
}
