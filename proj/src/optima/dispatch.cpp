#include "optima/dispatch.hpp"

#include <algorithm>
#include <stdexcept>

#include "txnsp/schedule.hpp"

namespace optima {

txnsp::ConflictMatrix build_conflict_matrix(std::span<const Transaction> batch) {
    const int n = static_cast<int>(batch.size());
    txnsp::ConflictMatrix conflicts(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& a = batch[static_cast<std::size_t>(i)].nonshareable_locks;
            const auto& b = batch[static_cast<std::size_t>(j)].nonshareable_locks;
            // both lists are ascending; merge walk for a shared id
            std::size_t ia = 0, ib = 0;
            bool shared = false;
            while (ia < a.size() && ib < b.size()) {
                if (a[ia] == b[ib]) { shared = true; break; }
                if (a[ia] < b[ib]) ++ia; else ++ib;
            }
            if (shared) conflicts.set(i, j);
        }
    }
    return conflicts;
}

BatchSchedule schedule_batch(std::vector<Transaction> batch, const EngineParams& params,
                             const txnsp::SaParams& sa_params) {
    if (batch.empty()) throw std::invalid_argument("schedule_batch: batch must be non-empty");

    BatchSchedule schedule;
    if (!params.optimization) {
        schedule.optimized = false;
        schedule.queues.resize(1);
        schedule.queues[0] = std::move(batch);
        return schedule;
    }

    const int m = params.thread_count;
    schedule.queues.resize(static_cast<std::size_t>(m));
    const int n = static_cast<int>(batch.size());
    if (n == 1) {
        schedule.queues[0].push_back(std::move(batch[0]));
        return schedule;
    }

    txnsp::ProblemInstance instance;
    instance.n = n;
    instance.m = m;
    instance.lengths.reserve(static_cast<std::size_t>(n));
    for (const Transaction& txn : batch)
        instance.lengths.push_back(std::max(txn.estimated_length, 1e-6));
    instance.conflicts = build_conflict_matrix(batch);

    txnsp::SolverResult solved = txnsp::solve_sa(instance, sa_params);

    // queue order per worker follows per-machine start times
    std::vector<std::vector<int>> jobs_by_machine(static_cast<std::size_t>(m));
    for (int job = 0; job < n; ++job) {
        const txnsp::Placement& p = solved.best_schedule.placements[static_cast<std::size_t>(job)];
        jobs_by_machine[static_cast<std::size_t>(p.machine)].push_back(job);
    }
    for (int k = 0; k < m; ++k) {
        auto& jobs = jobs_by_machine[static_cast<std::size_t>(k)];
        std::sort(jobs.begin(), jobs.end(), [&](int lhs, int rhs) {
            const auto& pl = solved.best_schedule.placements;
            if (pl[static_cast<std::size_t>(lhs)].start != pl[static_cast<std::size_t>(rhs)].start)
                return pl[static_cast<std::size_t>(lhs)].start < pl[static_cast<std::size_t>(rhs)].start;
            return lhs < rhs;
        });
        for (int job : jobs)
            schedule.queues[static_cast<std::size_t>(k)].push_back(std::move(batch[static_cast<std::size_t>(job)]));
    }
    return schedule;
}

}  // namespace optima
