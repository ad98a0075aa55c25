#pragma once

#include <cstdint>
#include <vector>

#include "txnsp/instance.hpp"

namespace txnsp {

struct Placement {
    int machine = -1;  // -1 while unplaced
    double start = 0.0;
    double completion = 0.0;

    bool operator==(const Placement&) const = default;
};

struct ScheduleMetrics {
    double makespan = 0.0;
    double min_time = 0.0;
};

// Growable set of job indices used for the forming subset of a
// subschedule; sized for arbitrary n (batches can exceed 64 jobs).
class JobSet {
public:
    JobSet() = default;
    explicit JobSet(int n) : n_(n), words_(static_cast<std::size_t>((n + 63) / 64), 0) {}

    bool contains(int job) const {
        return (words_[static_cast<std::size_t>(job) >> 6] >> (job & 63)) & 1ULL;
    }
    void add(int job) { words_[static_cast<std::size_t>(job) >> 6] |= 1ULL << (job & 63); }
    int count() const;
    int capacity() const { return n_; }
    const std::uint64_t* words() const { return words_.data(); }
    std::size_t word_count() const { return words_.size(); }

    bool operator==(const JobSet&) const = default;

private:
    int n_ = 0;
    std::vector<std::uint64_t> words_;
};

// A partial or full schedule in which every placed job starts at the
// earliest time the derivation rule allows. Value type; all mutation
// goes through extend()/derive().
struct Subschedule {
    std::vector<Placement> placements;     // indexed by job
    std::vector<double> machine_finish;    // finish of last job per machine, 0 if empty
    std::vector<int> last_on_machine;      // job id per machine, -1 if empty
    std::vector<int> insertion_order;      // placed jobs in insertion order
    JobSet placed;

    static Subschedule empty(const ProblemInstance& instance);

    int size() const { return static_cast<int>(insertion_order.size()); }
    bool is_full(const ProblemInstance& instance) const { return size() == instance.n; }

    // set of last jobs over non-empty machines, sorted ascending
    std::vector<int> last_jobs() const;

    bool operator==(const Subschedule&) const = default;
};

// Insert one job per the derivation rule: machine with the smallest
// finish time (lowest index on ties); start at the earliest time after
// that machine is free and every conflicting placed job completed.
// Throws std::invalid_argument if the job is already placed.
Subschedule extend(const Subschedule& sub, int job, const ProblemInstance& instance);
void extend_in_place(Subschedule& sub, int job, const ProblemInstance& instance);

// Full derivation of a permutation. Throws on invalid permutations.
Subschedule derive(const ProblemInstance& instance, const Permutation& perm);

ScheduleMetrics metrics(const Subschedule& sub);

// i dominates j: same forming subset and ms_i <= mt_j
bool dominates(const Subschedule& a, const Subschedule& b);

// same subset, equal last-job sets, identical completion time per job
bool equivalent(const Subschedule& a, const Subschedule& b);

// Deterministic tie-break key for pruning mutually dominating pairs:
// lexicographic machine-finish vector, then job-assignment vector.
// Returns true when a should be retained over b.
bool canonical_before(const Subschedule& a, const Subschedule& b);

// ---------------------------------------------------------------------
// Lean derivation kernel. Same rule as derive() but writes into caller
// scratch with no allocation; the solvers and the analyzer enumerate
// millions of permutations through this path. Kept semantically in lock
// step with derive() (tested against it).
// ---------------------------------------------------------------------
struct DeriveScratch {
    std::vector<double> completion;      // per job
    std::vector<double> machine_finish;  // per machine
    std::vector<std::uint64_t> placed;   // bitset words

    void prepare(const ProblemInstance& instance);
};

double derive_makespan(const ProblemInstance& instance, const int* order, int count,
                       DeriveScratch& scratch);

}  // namespace txnsp
