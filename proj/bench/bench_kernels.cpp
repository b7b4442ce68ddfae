// Times the blocked OpenMP objective kernels against the serial references
// on a synthetic problem and reports the agreement between the two paths.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "sarahbb/dataset.hpp"
#include "sarahbb/objective.hpp"
#include "sarahbb/rng.hpp"

using namespace sarahbb;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    double t0 = omp_get_wtime();
    fn();
    best = std::min(best, omp_get_wtime() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = 200000;
  std::size_t d = 64;
  int reps = 5;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      n = 20000;
      reps = 3;
    }
  }

  SyntheticSpec spec;
  spec.n = n;
  spec.d = d;
  spec.seed = 1;
  Dataset ds = generate_synthetic(spec);
  LogisticL2 obj(ds, 0.01);

  Rng rng(3);
  DenseVector w(d);
  for (double& x : w) x = 0.1 * rng.normal();

  std::printf("n=%zu d=%zu threads=%d reps=%d (best-of timing)\n", n, d,
              omp_get_max_threads(), reps);
  std::printf("%-14s %12s %12s %9s %12s\n", "kernel", "serial_ms",
              "parallel_ms", "speedup", "max_abs_diff");

  {
    volatile double sink = 0.0;
    double ts = time_best_of(reps, [&] { sink = obj.value_serial(w); });
    double tp = time_best_of(reps, [&] { sink = obj.value(w); });
    double diff = std::fabs(obj.value(w) - obj.value_serial(w));
    std::printf("%-14s %12.3f %12.3f %9.2f %12.3e\n", "value", ts * 1e3,
                tp * 1e3, ts / tp, diff);
    (void)sink;
  }
  {
    DenseVector gs(d), gp(d);
    double ts = time_best_of(reps, [&] { gs = obj.full_gradient_serial(w); });
    double tp = time_best_of(reps, [&] { obj.full_gradient(w, gp); });
    gs = obj.full_gradient_serial(w);
    obj.full_gradient(w, gp);
    double diff = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      diff = std::max(diff, std::fabs(gs[j] - gp[j]));
    std::printf("%-14s %12.3f %12.3f %9.2f %12.3e\n", "full_gradient",
                ts * 1e3, tp * 1e3, ts / tp, diff);
  }
  return 0;
}
