// Benchmark target: times the serial exhaustive-search reference against
// the OpenMP permutation scan (verifying bit-identical results) and puts
// the dynamic program next to them for scale.

#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "txnsp/instance.hpp"
#include "txnsp/rng.hpp"
#include "txnsp/solvers.hpp"

using namespace txnsp;

namespace {

struct Cell {
    double serial_ms = 0.0;
    double parallel_ms = 0.0;
    double dp_ms = 0.0;
    bool agree = true;
};

Cell measure(int n, int m, double cp, int repetitions, std::uint64_t seed) {
    Cell cell;
    for (int rep = 0; rep < repetitions; ++rep) {
        InstanceConfig config;
        config.n = n;
        config.m = m;
        config.conflict_parity = cp;
        config.rng_seed = derive_seed(seed, "bench", static_cast<std::uint64_t>(n) * 100 + m,
                                      static_cast<std::uint64_t>(rep));
        ProblemInstance instance = generate_instance(config);

        SolverResult serial = solve_exhaustive_serial(instance);
        SolverResult parallel = solve_exhaustive(instance);
        SolverResult dp = solve_dp(instance);

        cell.serial_ms += serial.wall_time.count() * 1000.0;
        cell.parallel_ms += parallel.wall_time.count() * 1000.0;
        cell.dp_ms += dp.wall_time.count() * 1000.0;
        cell.agree = cell.agree && serial.best_makespan == parallel.best_makespan &&
                     serial.best_permutation.order == parallel.best_permutation.order &&
                     dp.best_makespan == serial.best_makespan;
    }
    cell.serial_ms /= repetitions;
    cell.parallel_ms /= repetitions;
    cell.dp_ms /= repetitions;
    return cell;
}

}  // namespace

int main(int argc, char** argv) {
    int max_n = argc > 1 ? std::atoi(argv[1]) : 10;
    int repetitions = argc > 2 ? std::atoi(argv[2]) : 3;

#ifdef _OPENMP
    std::printf("openmp: %d thread(s)\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled\n");
#endif
    std::printf("%4s %3s %5s | %12s %12s %8s | %10s | %s\n", "n", "m", "cp", "es-serial", "es-omp",
                "speedup", "dp", "agree");

    for (int n = 7; n <= max_n; ++n) {
        for (double cp : {0.2, 0.6}) {
            Cell cell = measure(n, 3, cp, repetitions, 42);
            std::printf("%4d %3d %5.1f | %10.2fms %10.2fms %7.2fx | %8.2fms | %s\n", n, 3, cp,
                        cell.serial_ms, cell.parallel_ms,
                        cell.parallel_ms > 0 ? cell.serial_ms / cell.parallel_ms : 0.0, cell.dp_ms,
                        cell.agree ? "yes" : "NO");
            if (!cell.agree) return 1;
        }
    }
    return 0;
}
