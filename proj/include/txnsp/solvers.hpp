#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>

#include "txnsp/instance.hpp"
#include "txnsp/schedule.hpp"

namespace txnsp {

// Uniform result shape for all solvers. work_count counts permutations
// evaluated (ES), subschedules generated (DP), or moves proposed (SA).
struct SolverResult {
    double best_makespan = 0.0;
    Subschedule best_schedule;
    Permutation best_permutation;
    std::chrono::duration<double> wall_time{0.0};
    long long work_count = 0;
};

struct EsOptions {
    bool force = false;  // lift the n <= 12 guard
    int threads = 0;     // 0: library default (all available)
};

// Exhaustive search over all n! permutations; first permutation in
// lexicographic rank order wins ties.
SolverResult solve_exhaustive(const ProblemInstance& instance, const EsOptions& options = {});

// Single-threaded reference scan. solve_exhaustive must agree with this
// bit for bit (same makespan, same winning rank); the parallel kernel is
// tested and benchmarked against it.
SolverResult solve_exhaustive_serial(const ProblemInstance& instance, const EsOptions& options = {});

// Level-wise dynamic program over job subsets. Children are generated
// with the derivation rule; dominated subschedules are deleted, keeping
// one canonical representative among mutually dominating pairs, and
// equivalence duplicates are deleted during the first m levels.
SolverResult solve_dp(const ProblemInstance& instance);

enum class Cooling { Linear, Geometric, Slow };

struct SaParams {
    double t_max = 100.0;
    Cooling cooling = Cooling::Linear;
    double a = 0.01;     // linear decrement
    double r = 0.99;     // geometric ratio
    double beta = 1e-3;  // slow cooling rate
    // halt threshold; unset picks 0 for linear cooling and 1e-3 for
    // geometric/slow, which never reach 0
    std::optional<double> t_halt;
    std::uint64_t rng_seed = 0;
    // test hook: called once per proposal with (step, current, best)
    std::function<void(long long, double, double)> observer;

    double resolved_t_halt() const {
        if (t_halt) return *t_halt;
        return cooling == Cooling::Linear ? 0.0 : 1e-3;
    }
    void validate() const;
};

// Simulated annealing over the permutation space; neighbors swap one
// uniformly chosen pair of positions. Returns the best schedule seen.
SolverResult solve_sa(const ProblemInstance& instance, const SaParams& params);

// lexicographic permutation ranking helpers (shared by ES sharding)
std::uint64_t factorial(int n);
std::vector<int> unrank_permutation(int n, std::uint64_t rank);

}  // namespace txnsp
