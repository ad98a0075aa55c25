#include "txnsp/schedule.hpp"

#include <algorithm>
#include <bit>

namespace txnsp {

int JobSet::count() const {
    int total = 0;
    for (std::uint64_t w : words_) total += std::popcount(w);
    return total;
}

Subschedule Subschedule::empty(const ProblemInstance& instance) {
    Subschedule sub;
    sub.placements.resize(static_cast<std::size_t>(instance.n));
    sub.machine_finish.assign(static_cast<std::size_t>(instance.m), 0.0);
    sub.last_on_machine.assign(static_cast<std::size_t>(instance.m), -1);
    sub.placed = JobSet(instance.n);
    return sub;
}

std::vector<int> Subschedule::last_jobs() const {
    std::vector<int> jobs;
    for (int job : last_on_machine)
        if (job >= 0) jobs.push_back(job);
    std::sort(jobs.begin(), jobs.end());
    return jobs;
}

void extend_in_place(Subschedule& sub, int job, const ProblemInstance& instance) {
    if (job < 0 || job >= instance.n)
        throw std::invalid_argument("extend: job index out of range");
    if (sub.placed.contains(job))
        throw std::invalid_argument("extend: job already placed");

    int machine = 0;
    for (int k = 1; k < instance.m; ++k)
        if (sub.machine_finish[static_cast<std::size_t>(k)] <
            sub.machine_finish[static_cast<std::size_t>(machine)])
            machine = k;

    double start = sub.machine_finish[static_cast<std::size_t>(machine)];
    const std::uint64_t* conflict_row = instance.conflicts.row(job);
    for (std::size_t w = 0; w < sub.placed.word_count(); ++w) {
        std::uint64_t hits = conflict_row[w] & sub.placed.words()[w];
        while (hits) {
            int other = static_cast<int>(w * 64) + std::countr_zero(hits);
            hits &= hits - 1;
            start = std::max(start, sub.placements[static_cast<std::size_t>(other)].completion);
        }
    }

    double completion = start + instance.lengths[static_cast<std::size_t>(job)];
    sub.placements[static_cast<std::size_t>(job)] = Placement{machine, start, completion};
    sub.machine_finish[static_cast<std::size_t>(machine)] = completion;
    sub.last_on_machine[static_cast<std::size_t>(machine)] = job;
    sub.insertion_order.push_back(job);
    sub.placed.add(job);
}

Subschedule extend(const Subschedule& sub, int job, const ProblemInstance& instance) {
    Subschedule next = sub;
    extend_in_place(next, job, instance);
    return next;
}

Subschedule derive(const ProblemInstance& instance, const Permutation& perm) {
    perm.validate(instance.n);
    Subschedule sub = Subschedule::empty(instance);
    for (int job : perm.order) extend_in_place(sub, job, instance);
    return sub;
}

ScheduleMetrics metrics(const Subschedule& sub) {
    ScheduleMetrics result;
    if (sub.machine_finish.empty()) return result;
    result.makespan = sub.machine_finish.front();
    result.min_time = sub.machine_finish.front();
    for (double finish : sub.machine_finish) {
        result.makespan = std::max(result.makespan, finish);
        result.min_time = std::min(result.min_time, finish);
    }
    return result;
}

bool dominates(const Subschedule& a, const Subschedule& b) {
    if (a.placed != b.placed) return false;
    return metrics(a).makespan <= metrics(b).min_time;
}

bool equivalent(const Subschedule& a, const Subschedule& b) {
    if (a.placed != b.placed) return false;
    if (a.last_jobs() != b.last_jobs()) return false;
    const int n = static_cast<int>(a.placements.size());
    for (int job = 0; job < n; ++job) {
        if (!a.placed.contains(job)) continue;
        if (a.placements[static_cast<std::size_t>(job)].completion !=
            b.placements[static_cast<std::size_t>(job)].completion)
            return false;
    }
    return true;
}

bool canonical_before(const Subschedule& a, const Subschedule& b) {
    if (a.machine_finish != b.machine_finish)
        return a.machine_finish < b.machine_finish;
    const std::size_t n = a.placements.size();
    for (std::size_t job = 0; job < n; ++job) {
        int ma = a.placements[job].machine;
        int mb = b.placements[job].machine;
        if (ma != mb) return ma < mb;
    }
    return false;
}

void DeriveScratch::prepare(const ProblemInstance& instance) {
    completion.assign(static_cast<std::size_t>(instance.n), 0.0);
    machine_finish.assign(static_cast<std::size_t>(instance.m), 0.0);
    placed.assign(instance.conflicts.words_per_row(), 0);
}

double derive_makespan(const ProblemInstance& instance, const int* order, int count,
                       DeriveScratch& scratch) {
    std::fill(scratch.machine_finish.begin(), scratch.machine_finish.end(), 0.0);
    std::fill(scratch.placed.begin(), scratch.placed.end(), 0);

    const int m = instance.m;
    double makespan = 0.0;
    for (int idx = 0; idx < count; ++idx) {
        const int job = order[idx];
        int machine = 0;
        double start = scratch.machine_finish[0];
        for (int k = 1; k < m; ++k) {
            double finish = scratch.machine_finish[static_cast<std::size_t>(k)];
            if (finish < start) {
                start = finish;
                machine = k;
            }
        }
        const std::uint64_t* conflict_row = instance.conflicts.row(job);
        for (std::size_t w = 0; w < scratch.placed.size(); ++w) {
            std::uint64_t hits = conflict_row[w] & scratch.placed[w];
            while (hits) {
                int other = static_cast<int>(w * 64) + std::countr_zero(hits);
                hits &= hits - 1;
                start = std::max(start, scratch.completion[static_cast<std::size_t>(other)]);
            }
        }
        double completion = start + instance.lengths[static_cast<std::size_t>(job)];
        scratch.completion[static_cast<std::size_t>(job)] = completion;
        scratch.machine_finish[static_cast<std::size_t>(machine)] = completion;
        scratch.placed[static_cast<std::size_t>(job) >> 6] |= 1ULL << (job & 63);
        makespan = std::max(makespan, completion);
    }
    return makespan;
}

}  // namespace txnsp
