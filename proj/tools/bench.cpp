// Compares the OpenMP phase-space kernels against a single-thread run
// of the same code: wall time and max absolute result difference (which
// must be 0 -- accumulation order is fixed by construction).

#include <chrono>
#include <cstdio>

#include "sce/fidelity.hpp"
#include "sce/quantum_oracle.hpp"
#include "sce/revivals.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace sce;

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class F>
void bench(const char* name, F work) {
  set_threads(1);
  double t0 = now();
  const std::vector<double> serial = work();
  const double t_serial = now() - t0;

  set_threads(max_threads());
  t0 = now();
  const std::vector<double> parallel = work();
  const double t_parallel = now() - t0;

  double diff = 0.0;
  for (std::size_t i = 0; i < serial.size(); ++i)
    diff = std::max(diff, std::abs(serial[i] - parallel[i]));
  std::printf("%-28s serial %8.3fs  omp(%d) %8.3fs  speedup %5.2fx  maxdiff %g\n",
              name, t_serial, max_threads(), t_parallel,
              t_serial / std::max(1e-12, t_parallel), diff);
}

}  // namespace

int main() {
  const Mat F = rotation_matrix(1.0) * (Mat(2, 2) << 1.3, 0.0, 0.0, 1 / 1.3).finished();

  bench("overlap_sq_integral", [&] {
    return std::vector<double>{overlap_sq_integral(F, 0.5, 8.0, 200)};
  });

  bench("metaplectic_trace", [&] {
    return std::vector<double>{metaplectic_trace(F, Vec::Zero(2), 0.5, 8.0, 200)};
  });

  bench("revival_scan[pendulum]", [&] {
    Vec alpha(2);
    alpha << 1.2, 0.0;
    std::vector<double> t(400);
    for (std::size_t i = 0; i < t.size(); ++i)
      t[i] = 12.0 * static_cast<double>(i + 1) / static_cast<double>(t.size());
    const RevivalReport rep =
        revival_scan(HamiltonianModel::pendulum(), alpha, 0.05, t);
    std::vector<double> out;
    for (std::size_t i = 0; i < rep.R.size(); ++i)
      out.push_back(rep.defined[i] ? rep.R[i] : -1.0);
    return out;
  });

  bench("classical_autocorrelation", [&] {
    PerturbationModel V;
    V.symbol = [](const Vec& z) { return z(0); };
    V.quantized = [](double x) { return x; };
    std::vector<double> t(257);
    for (std::size_t i = 0; i < t.size(); ++i)
      t[i] = 2.0 * M_PI * static_cast<double>(i) / 256.0;
    const CorrelationSeries C = classical_autocorrelation(
        HamiltonianModel::harmonic(), V, 0.5, t, 800, 11);
    return C.C;
  });

  return 0;
}
