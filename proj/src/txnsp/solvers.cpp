#include "txnsp/solvers.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace txnsp {

namespace {

using Clock = std::chrono::steady_clock;

int resolve_threads(int requested) {
    if (requested > 0) return requested;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// unbiased bounded draw (multiply-shift with rejection)
std::uint64_t random_below(std::mt19937_64& rng, std::uint64_t bound) {
    while (true) {
        std::uint64_t x = rng();
        __uint128_t product = static_cast<__uint128_t>(x) * bound;
        std::uint64_t low = static_cast<std::uint64_t>(product);
        if (low >= bound || low >= static_cast<std::uint64_t>(-bound) % bound)
            return static_cast<std::uint64_t>(product >> 64);
    }
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}

SolverResult finish_result(const ProblemInstance& instance, Permutation perm,
                           Clock::time_point started, long long work) {
    SolverResult result;
    result.best_schedule = derive(instance, perm);
    result.best_permutation = std::move(perm);
    result.best_makespan = metrics(result.best_schedule).makespan;
    result.work_count = work;
    result.wall_time = Clock::now() - started;
    return result;
}

}  // namespace

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

std::vector<int> unrank_permutation(int n, std::uint64_t rank) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = n; i >= 1; --i) {
        std::uint64_t block = factorial(i - 1);
        std::size_t idx = static_cast<std::size_t>(rank / block);
        rank %= block;
        out.push_back(pool[idx]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    return out;
}

namespace {

constexpr int kEsGuard = 12;

void check_es_guard(const ProblemInstance& instance, const EsOptions& options) {
    instance.validate();
    if (instance.n < 1) throw std::invalid_argument("exhaustive search requires n >= 1");
    if (instance.n > kEsGuard && !options.force)
        throw InstanceTooLarge("exhaustive search refused for n > 12 (pass force to override)");
}

struct RankedBest {
    double makespan = std::numeric_limits<double>::infinity();
    std::uint64_t rank = 0;

    void consider(double ms, std::uint64_t r) {
        if (ms < makespan || (ms == makespan && r < rank)) {
            makespan = ms;
            rank = r;
        }
    }
};

// scan `count` permutations in lexicographic order starting at `rank`
RankedBest scan_range(const ProblemInstance& instance, std::uint64_t rank, std::uint64_t count) {
    std::vector<int> perm = unrank_permutation(instance.n, rank);
    DeriveScratch scratch;
    scratch.prepare(instance);
    RankedBest best;
    for (std::uint64_t i = 0; i < count; ++i) {
        double ms = derive_makespan(instance, perm.data(), instance.n, scratch);
        best.consider(ms, rank + i);
        std::next_permutation(perm.begin(), perm.end());
    }
    return best;
}

}  // namespace

SolverResult solve_exhaustive_serial(const ProblemInstance& instance, const EsOptions& options) {
    check_es_guard(instance, options);
    auto started = Clock::now();
    const std::uint64_t total = factorial(instance.n);
    RankedBest best = scan_range(instance, 0, total);
    Permutation perm{unrank_permutation(instance.n, best.rank)};
    return finish_result(instance, std::move(perm), started, static_cast<long long>(total));
}

SolverResult solve_exhaustive(const ProblemInstance& instance, const EsOptions& options) {
    check_es_guard(instance, options);
    auto started = Clock::now();
    const std::uint64_t total = factorial(instance.n);
    const int threads = static_cast<int>(std::max<std::uint64_t>(
        1, std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_threads(options.threads)), total)));

    std::vector<RankedBest> partial(static_cast<std::size_t>(threads));
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) num_threads(threads)
#endif
    for (int t = 0; t < threads; ++t) {
        std::uint64_t lo = total * static_cast<std::uint64_t>(t) / static_cast<std::uint64_t>(threads);
        std::uint64_t hi = total * (static_cast<std::uint64_t>(t) + 1) / static_cast<std::uint64_t>(threads);
        partial[static_cast<std::size_t>(t)] = scan_range(instance, lo, hi - lo);
    }

    RankedBest best;
    for (const RankedBest& candidate : partial) best.consider(candidate.makespan, candidate.rank);
    Permutation perm{unrank_permutation(instance.n, best.rank)};
    return finish_result(instance, std::move(perm), started, static_cast<long long>(total));
}

// ---------------------------------------------------------------------
// Dynamic programming
// ---------------------------------------------------------------------

namespace {

// Structure-of-arrays store for DP subschedules. Rows of pruned nodes
// are recycled within the level being built; surviving rows stay live so
// the winning insertion order can be backtracked through parent links.
class DpArena {
public:
    DpArena(int n, int m) : n_(n), m_(m) {}

    std::int32_t allocate() {
        if (!free_.empty()) {
            std::int32_t row = free_.back();
            free_.pop_back();
            return row;
        }
        std::int32_t row = static_cast<std::int32_t>(parent_.size());
        ct_.resize(ct_.size() + static_cast<std::size_t>(n_), 0.0);
        mf_.resize(mf_.size() + static_cast<std::size_t>(m_), 0.0);
        machine_of_.resize(machine_of_.size() + static_cast<std::size_t>(n_), -1);
        last_job_.resize(last_job_.size() + static_cast<std::size_t>(m_), -1);
        parent_.push_back(-1);
        inserted_.push_back(-1);
        ms_.push_back(0.0);
        mt_.push_back(0.0);
        return row;
    }

    void release(std::int32_t row) { free_.push_back(row); }

    double* ct(std::int32_t row) { return ct_.data() + static_cast<std::size_t>(row) * n_; }
    double* mf(std::int32_t row) { return mf_.data() + static_cast<std::size_t>(row) * m_; }
    std::int8_t* machine_of(std::int32_t row) { return machine_of_.data() + static_cast<std::size_t>(row) * n_; }
    std::int8_t* last_job(std::int32_t row) { return last_job_.data() + static_cast<std::size_t>(row) * m_; }
    const double* ct(std::int32_t row) const { return ct_.data() + static_cast<std::size_t>(row) * n_; }
    const double* mf(std::int32_t row) const { return mf_.data() + static_cast<std::size_t>(row) * m_; }
    const std::int8_t* machine_of(std::int32_t row) const { return machine_of_.data() + static_cast<std::size_t>(row) * n_; }
    const std::int8_t* last_job(std::int32_t row) const { return last_job_.data() + static_cast<std::size_t>(row) * m_; }

    std::int32_t& parent(std::int32_t row) { return parent_[static_cast<std::size_t>(row)]; }
    std::int8_t& inserted(std::int32_t row) { return inserted_[static_cast<std::size_t>(row)]; }
    double& ms(std::int32_t row) { return ms_[static_cast<std::size_t>(row)]; }
    double& mt(std::int32_t row) { return mt_[static_cast<std::size_t>(row)]; }
    double ms(std::int32_t row) const { return ms_[static_cast<std::size_t>(row)]; }
    double mt(std::int32_t row) const { return mt_[static_cast<std::size_t>(row)]; }
    std::int32_t parent(std::int32_t row) const { return parent_[static_cast<std::size_t>(row)]; }
    std::int8_t inserted(std::int32_t row) const { return inserted_[static_cast<std::size_t>(row)]; }

    int jobs() const { return n_; }
    int machines() const { return m_; }

private:
    int n_;
    int m_;
    std::vector<double> ct_;
    std::vector<double> mf_;
    std::vector<std::int8_t> machine_of_;
    std::vector<std::int8_t> last_job_;
    std::vector<std::int32_t> parent_;
    std::vector<std::int8_t> inserted_;
    std::vector<double> ms_;
    std::vector<double> mt_;
    std::vector<std::int32_t> free_;
};

bool rows_equal(const double* a, const double* b, int count) {
    for (int i = 0; i < count; ++i)
        if (a[i] != b[i]) return false;
    return true;
}

// last-job sets compared as sets (machine identity must not matter)
bool last_job_sets_equal(const std::int8_t* a, const std::int8_t* b, int m) {
    std::array<std::int8_t, 64> sa{}, sb{};
    std::copy(a, a + m, sa.begin());
    std::copy(b, b + m, sb.begin());
    std::sort(sa.begin(), sa.begin() + m);
    std::sort(sb.begin(), sb.begin() + m);
    return std::equal(sa.begin(), sa.begin() + m, sb.begin());
}

// retained-first ordering on mutually dominating pairs
bool dp_canonical_before(const DpArena& arena, std::int32_t a, std::int32_t b) {
    const int m = arena.machines();
    for (int k = 0; k < m; ++k) {
        if (arena.mf(a)[k] != arena.mf(b)[k]) return arena.mf(a)[k] < arena.mf(b)[k];
    }
    const int n = arena.jobs();
    for (int j = 0; j < n; ++j) {
        if (arena.machine_of(a)[j] != arena.machine_of(b)[j])
            return arena.machine_of(a)[j] < arena.machine_of(b)[j];
    }
    return false;
}

}  // namespace

SolverResult solve_dp(const ProblemInstance& instance) {
    instance.validate();
    if (instance.n < 1) throw std::invalid_argument("dp solver requires n >= 1");
    if (instance.n > 63) throw InstanceTooLarge("dp solver limited to n <= 63 (subset bitmask)");

    auto started = Clock::now();
    const int n = instance.n;
    const int m = instance.m;

    DpArena arena(n, m);
    long long generated = 0;

    std::int32_t root = arena.allocate();  // empty subschedule
    std::vector<std::int32_t> frontier{root};
    std::vector<std::uint64_t> frontier_mask{0};

    // scratch row reused for every candidate until it survives pruning
    std::int32_t scratch = arena.allocate();

    for (int level = 1; level <= n; ++level) {
        const bool check_equivalence = level <= m;
        std::map<std::uint64_t, std::vector<std::int32_t>> groups;

        for (std::size_t u = 0; u < frontier.size(); ++u) {
            const std::int32_t node = frontier[u];
            const std::uint64_t mask = frontier_mask[u];
            for (int job = 0; job < n; ++job) {
                if (mask & (1ULL << job)) continue;
                ++generated;

                // derive the child into the scratch row
                std::copy(arena.ct(node), arena.ct(node) + n, arena.ct(scratch));
                std::copy(arena.mf(node), arena.mf(node) + m, arena.mf(scratch));
                std::copy(arena.machine_of(node), arena.machine_of(node) + n, arena.machine_of(scratch));
                std::copy(arena.last_job(node), arena.last_job(node) + m, arena.last_job(scratch));

                int machine = 0;
                for (int k = 1; k < m; ++k)
                    if (arena.mf(scratch)[k] < arena.mf(scratch)[machine]) machine = k;
                double start = arena.mf(scratch)[machine];
                const std::uint64_t* conflict_row = instance.conflicts.row(job);
                std::uint64_t hits = conflict_row[0] & mask;
                while (hits) {
                    int other = std::countr_zero(hits);
                    hits &= hits - 1;
                    start = std::max(start, arena.ct(scratch)[other]);
                }
                double completion = start + instance.lengths[static_cast<std::size_t>(job)];
                arena.ct(scratch)[job] = completion;
                arena.mf(scratch)[machine] = completion;
                arena.machine_of(scratch)[job] = static_cast<std::int8_t>(machine);
                arena.last_job(scratch)[machine] = static_cast<std::int8_t>(job);
                arena.parent(scratch) = node;
                arena.inserted(scratch) = static_cast<std::int8_t>(job);
                double ms = arena.mf(scratch)[0];
                double mt = arena.mf(scratch)[0];
                for (int k = 1; k < m; ++k) {
                    ms = std::max(ms, arena.mf(scratch)[k]);
                    mt = std::min(mt, arena.mf(scratch)[k]);
                }
                arena.ms(scratch) = ms;
                arena.mt(scratch) = mt;

                std::vector<std::int32_t>& group = groups[mask | (1ULL << job)];
                bool discard = false;
                for (std::size_t g = 0; g < group.size() && !discard;) {
                    const std::int32_t rival = group[g];
                    if (check_equivalence && rows_equal(arena.ct(rival), arena.ct(scratch), n) &&
                        last_job_sets_equal(arena.last_job(rival), arena.last_job(scratch), m)) {
                        discard = true;
                        break;
                    }
                    const bool rival_dominates = arena.ms(rival) <= arena.mt(scratch);
                    const bool child_dominates = arena.ms(scratch) <= arena.mt(rival);
                    if (rival_dominates && child_dominates) {
                        if (dp_canonical_before(arena, rival, scratch)) {
                            discard = true;
                        } else {
                            arena.release(rival);
                            group[g] = group.back();
                            group.pop_back();
                            continue;
                        }
                    } else if (rival_dominates) {
                        discard = true;
                    } else if (child_dominates) {
                        arena.release(rival);
                        group[g] = group.back();
                        group.pop_back();
                        continue;
                    }
                    ++g;
                }
                if (!discard) {
                    group.push_back(scratch);
                    scratch = arena.allocate();
                }
            }
        }

        frontier.clear();
        frontier_mask.clear();
        for (const auto& [mask, nodes] : groups) {
            for (std::int32_t node : nodes) {
                frontier.push_back(node);
                frontier_mask.push_back(mask);
            }
        }
    }

    // minimal makespan among full schedules; canonical order breaks ties
    std::int32_t best = frontier.front();
    for (std::size_t i = 1; i < frontier.size(); ++i) {
        std::int32_t node = frontier[i];
        if (arena.ms(node) < arena.ms(best) ||
            (arena.ms(node) == arena.ms(best) && dp_canonical_before(arena, node, best)))
            best = node;
    }

    Permutation perm;
    perm.order.resize(static_cast<std::size_t>(n));
    std::int32_t walk = best;
    for (int i = n - 1; i >= 0; --i) {
        perm.order[static_cast<std::size_t>(i)] = arena.inserted(walk);
        walk = arena.parent(walk);
    }
    return finish_result(instance, std::move(perm), started, generated);
}

// ---------------------------------------------------------------------
// Simulated annealing
// ---------------------------------------------------------------------

void SaParams::validate() const {
    if (!(t_max > 0.0)) throw std::invalid_argument("sa: t_max must be positive");
    if (cooling == Cooling::Linear && !(a > 0.0))
        throw std::invalid_argument("sa: linear decrement a must be positive");
    if (cooling == Cooling::Geometric && !(r > 0.0 && r < 1.0))
        throw std::invalid_argument("sa: geometric ratio r must lie in (0,1)");
    if (cooling == Cooling::Slow && !(beta > 0.0))
        throw std::invalid_argument("sa: slow cooling beta must be positive");
    const double halt = resolved_t_halt();
    if (halt < 0.0) throw std::invalid_argument("sa: t_halt must be non-negative");
    if (!(halt < t_max)) throw std::invalid_argument("sa: t_halt must be below t_max");
}

SolverResult solve_sa(const ProblemInstance& instance, const SaParams& params) {
    instance.validate();
    if (instance.n < 2) throw std::invalid_argument("sa solver requires n >= 2");
    params.validate();

    auto started = Clock::now();
    const int n = instance.n;
    const double t_halt = params.resolved_t_halt();
    std::mt19937_64 rng(params.rng_seed);

    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(random_below(rng, static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
    }

    DeriveScratch scratch;
    scratch.prepare(instance);
    double current = derive_makespan(instance, perm.data(), n, scratch);
    double best = current;
    std::vector<int> best_perm = perm;

    double temperature = params.t_max;
    long long step = 0;
    while (temperature > t_halt) {
        std::size_t i = static_cast<std::size_t>(random_below(rng, static_cast<std::uint64_t>(n)));
        std::size_t j = static_cast<std::size_t>(random_below(rng, static_cast<std::uint64_t>(n) - 1));
        if (j >= i) ++j;
        std::swap(perm[i], perm[j]);
        double candidate = derive_makespan(instance, perm.data(), n, scratch);
        double delta = candidate - current;
        bool accept = delta <= 0.0 || uniform01(rng) < std::exp(-delta / temperature);
        if (accept) {
            current = candidate;
            if (current < best) {
                best = current;
                best_perm = perm;
            }
        } else {
            std::swap(perm[i], perm[j]);
        }
        ++step;
        if (params.observer) params.observer(step, current, best);
        switch (params.cooling) {
            case Cooling::Linear:
                // recomputed from the step index so decimal decrements
                // hit the halt threshold without drift
                temperature = params.t_max - static_cast<double>(step) * params.a;
                break;
            case Cooling::Geometric:
                temperature *= params.r;
                break;
            case Cooling::Slow:
                temperature = temperature / (1.0 + params.beta * temperature);
                break;
        }
    }

    return finish_result(instance, Permutation{std::move(best_perm)}, started, step);
}

}  // namespace txnsp
