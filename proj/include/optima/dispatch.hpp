#pragma once

#include <span>

#include "optima/transaction.hpp"
#include "txnsp/instance.hpp"
#include "txnsp/solvers.hpp"

namespace optima {

// Per-worker FIFO queues produced by scheduling one batch. When
// optimization is off the schedule degenerates to a single dispatch
// queue and workers pull from it first-idle-first-served.
struct BatchSchedule {
    bool optimized = true;
    std::vector<std::vector<Transaction>> queues;

    std::size_t transaction_count() const {
        std::size_t total = 0;
        for (const auto& q : queues) total += q.size();
        return total;
    }
};

// C[i][j] = 1 iff transactions i and j lock a common non-shareable plugin
txnsp::ConflictMatrix build_conflict_matrix(std::span<const Transaction> batch);

// Schedules a batch onto `params.thread_count` workers by solving the
// induced scheduling instance with simulated annealing and reading the
// per-machine start order back out of the solution.
BatchSchedule schedule_batch(std::vector<Transaction> batch, const EngineParams& params,
                             const txnsp::SaParams& sa_params);

}  // namespace optima
