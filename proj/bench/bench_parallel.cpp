// Timings for the OpenMP kernels against their serial references: the
// frequency-grid oracles and the sweep cell runner. Results must agree
// exactly; the table reports wall time and speedup.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "ddv/lti.hpp"
#include "ddv/verify_state.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace ddv;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Matrix rand_inputs(int m, int N, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Matrix u(m, N);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < N; ++k) u(i, k) = U(rng);
  return u;
}

void row(const char* name, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-28s %10.1f ms %10.1f ms   x%.2f  %s\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms,
              match ? "results match" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("omp threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel paths run serially\n");
#endif
  std::printf("%-28s %13s %13s\n", "kernel", "serial", "parallel");

  // frequency-grid oracles on a moderately large system and a dense grid
  {
    LtiSystem sys = random_system(12, 3, 3, 0.05, 1);
    const int grid = 1 << 15;
    double t0 = now_ms();
    double g_serial = hinf_oracle(sys, grid, true, false);
    double t1 = now_ms();
    double g_parallel = hinf_oracle(sys, grid, true, true);
    double t2 = now_ms();
    row("hinf oracle", t1 - t0, t2 - t1, g_serial == g_parallel);

    t0 = now_ms();
    double r_serial = passivity_oracle(sys, grid, true, false);
    t1 = now_ms();
    double r_parallel = passivity_oracle(sys, grid, true, true);
    t2 = now_ms();
    row("passivity oracle", t1 - t0, t2 - t1, r_serial == r_parallel);
  }

  // sweep cells: one robust gain optimization per noise bound, the same
  // shape the cli sweep runs. Each cell owns its problem and solver.
  {
    std::mt19937_64 rng(7);
    LtiSystem sys = random_system(3, 1, 1, 0.2, 7);
    const int N = 80;
    Matrix u = rand_inputs(1, N, rng);
    Trajectory t = simulate(sys, u, Vector::Zero(3));
    StateDataMatrices d = build_state_data(t);

    std::vector<double> bounds;
    for (int j = 0; j < 8; ++j) bounds.push_back(1e-4 * std::pow(2.0, j));
    auto cell = [&](double w) {
      QuadraticMatrixSet set = sigma_xu_quadratic(
          d, norm_bound_noise_set(w, N, 3, NoiseTarget::ProcessState));
      Verdict v = optimize_gain_robust(set, sys.C, sys.D);
      return v.certificate ? v.certificate->performance
                           : std::numeric_limits<double>::quiet_NaN();
    };

    std::vector<double> serial(bounds.size()), parallel(bounds.size());
    double t0 = now_ms();
    for (size_t j = 0; j < bounds.size(); ++j) serial[j] = cell(bounds[j]);
    double t1 = now_ms();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int j = 0; j < static_cast<int>(bounds.size()); ++j)
      parallel[j] = cell(bounds[j]);
    double t2 = now_ms();
    bool match = true;
    for (size_t j = 0; j < bounds.size(); ++j)
      match = match && (serial[j] == parallel[j] ||
                        (std::isnan(serial[j]) && std::isnan(parallel[j])));
    row("sweep cells (8 bounds)", t1 - t0, t2 - t1, match);
  }
  return 0;
}
