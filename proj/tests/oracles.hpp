#pragma once

// Independent test oracles. These deliberately avoid the library's
// derivation code: machine choice is enumerated exhaustively and start
// times are replayed with local logic, so agreement with the solvers is
// meaningful evidence rather than a tautology.

#include <algorithm>
#include <limits>
#include <vector>

#include "txnsp/instance.hpp"

namespace oracles {

namespace detail {

struct ReplayState {
    const txnsp::ProblemInstance* instance;
    std::vector<double> machine_finish;
    std::vector<double> completion;
    std::vector<int> placed;
    std::vector<char> used;
    double best = std::numeric_limits<double>::infinity();
};

// place every remaining job on every machine, earliest feasible start
inline void enumerate(ReplayState& state) {
    const txnsp::ProblemInstance& inst = *state.instance;
    if (static_cast<int>(state.placed.size()) == inst.n) {
        double ms = 0.0;
        for (double f : state.machine_finish) ms = std::max(ms, f);
        state.best = std::min(state.best, ms);
        return;
    }
    for (int job = 0; job < inst.n; ++job) {
        if (state.used[static_cast<std::size_t>(job)]) continue;
        double conflict_floor = 0.0;
        for (int other : state.placed)
            if (inst.conflicts.at(job, other))
                conflict_floor =
                    std::max(conflict_floor, state.completion[static_cast<std::size_t>(other)]);
        for (int machine = 0; machine < inst.m; ++machine) {
            double start = std::max(state.machine_finish[static_cast<std::size_t>(machine)],
                                    conflict_floor);
            double completion = start + inst.lengths[static_cast<std::size_t>(job)];

            double saved_finish = state.machine_finish[static_cast<std::size_t>(machine)];
            state.machine_finish[static_cast<std::size_t>(machine)] = completion;
            state.completion[static_cast<std::size_t>(job)] = completion;
            state.used[static_cast<std::size_t>(job)] = 1;
            state.placed.push_back(job);

            enumerate(state);

            state.placed.pop_back();
            state.used[static_cast<std::size_t>(job)] = 0;
            state.machine_finish[static_cast<std::size_t>(machine)] = saved_finish;
        }
    }
}

}  // namespace detail

// Optimal makespan over every insertion order x machine assignment with
// earliest-start semantics. Exponential; keep n <= 6.
inline double brute_force_optimum(const txnsp::ProblemInstance& instance) {
    detail::ReplayState state;
    state.instance = &instance;
    state.machine_finish.assign(static_cast<std::size_t>(instance.m), 0.0);
    state.completion.assign(static_cast<std::size_t>(instance.n), 0.0);
    state.used.assign(static_cast<std::size_t>(instance.n), 0);
    detail::enumerate(state);
    return state.best;
}

namespace detail {

inline void partition(const std::vector<double>& lengths, std::size_t index,
                      std::vector<double>& loads, double& best) {
    if (index == lengths.size()) {
        double ms = 0.0;
        for (double load : loads) ms = std::max(ms, load);
        best = std::min(best, ms);
        return;
    }
    for (std::size_t machine = 0; machine < loads.size(); ++machine) {
        if (loads[machine] + lengths[index] >= best) continue;  // bound
        loads[machine] += lengths[index];
        partition(lengths, index + 1, loads, best);
        loads[machine] -= lengths[index];
        if (loads[machine] == 0.0) break;  // identical empty machines
    }
}

}  // namespace detail

// Optimal multiway-partition makespan (the conflict-free special case).
inline double partition_optimum(const std::vector<double>& lengths, int machines) {
    double total = 0.0;
    for (double len : lengths) total += len;
    double best = total + 1.0;
    std::vector<double> loads(static_cast<std::size_t>(machines), 0.0);
    detail::partition(lengths, 0, loads, best);
    return best;
}

}  // namespace oracles
