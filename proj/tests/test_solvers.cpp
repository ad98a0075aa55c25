#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "txnsp/rng.hpp"
#include "txnsp/schedule.hpp"
#include "txnsp/solvers.hpp"

using namespace txnsp;

namespace {

ProblemInstance make_instance(std::vector<double> lengths, int m,
                              std::vector<std::pair<int, int>> conflicts = {}) {
    ProblemInstance inst;
    inst.n = static_cast<int>(lengths.size());
    inst.m = m;
    inst.lengths = std::move(lengths);
    inst.conflicts = ConflictMatrix(inst.n);
    for (auto [a, b] : conflicts) inst.conflicts.set(a, b);
    inst.validate();
    return inst;
}

InstanceConfig config_of(int n, int m, double cp, std::uint64_t seed) {
    InstanceConfig config;
    config.n = n;
    config.m = m;
    config.conflict_parity = cp;
    config.rng_seed = seed;
    return config;
}

}  // namespace

TEST_CASE("exhaustive search worked examples") {
    auto conflict_pair = make_instance({4, 3}, 2, {{0, 1}});
    CHECK(solve_exhaustive(conflict_pair).best_makespan == 7.0);

    auto three = make_instance({4, 3, 2}, 2);
    auto result = solve_exhaustive(three);
    CHECK(result.best_makespan == 5.0);
    CHECK(result.work_count == 6);

    auto full = make_instance({1, 2, 3}, 2, {{0, 1}, {0, 2}, {1, 2}});
    CHECK(solve_exhaustive(full).best_makespan == 6.0);
}

TEST_CASE("exhaustive search guard") {
    auto big = generate_instance(config_of(13, 3, 0.2, 1));
    CHECK_THROWS_AS(solve_exhaustive(big), InstanceTooLarge);
    EsOptions force;
    force.force = true;
    // forced run is legal (not executed here: 13! derivations)
    auto zero = ProblemInstance{};
    CHECK_THROWS_AS(solve_exhaustive(zero), std::invalid_argument);
}

TEST_CASE("permutation unranking is lexicographic") {
    std::vector<int> perm = {0, 1, 2, 3};
    for (std::uint64_t rank = 0; rank < factorial(4); ++rank) {
        CHECK(unrank_permutation(4, rank) == perm);
        std::next_permutation(perm.begin(), perm.end());
    }
}

TEST_CASE("parallel scan matches the serial reference bit for bit") {
    std::mt19937_64 rng(555);
    for (int round = 0; round < 12; ++round) {
        const int n = 4 + static_cast<int>(rng() % 4);
        auto inst = generate_instance(config_of(n, 2 + static_cast<int>(rng() % 3),
                                                static_cast<double>(rng() % 5) / 4.0, rng()));
        EsOptions wide;
        wide.threads = 5;  // force sharding even on one core
        auto serial = solve_exhaustive_serial(inst);
        auto parallel = solve_exhaustive(inst, wide);
        CHECK(serial.best_makespan == parallel.best_makespan);
        CHECK(serial.best_permutation.order == parallel.best_permutation.order);
        CHECK(serial.work_count == parallel.work_count);
        CHECK(parallel.work_count == static_cast<long long>(factorial(n)));
    }
}

TEST_CASE("dp handles the single job") {
    auto one = make_instance({7}, 3);
    auto result = solve_dp(one);
    CHECK(result.best_makespan == 7.0);
    CHECK(result.best_permutation.order == std::vector<int>{0});
}

TEST_CASE("dp equals exhaustive search on random instances") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 60; ++round) {
        const int n = 5 + static_cast<int>(rng() % 5);  // 5..9
        const int m = 2 + static_cast<int>(rng() % 3);
        const double cp = static_cast<double>(rng() % 6) / 5.0;
        auto inst = generate_instance(config_of(n, m, cp, rng()));
        auto es = solve_exhaustive(inst);
        auto dp = solve_dp(inst);
        CAPTURE(n);
        CAPTURE(m);
        CAPTURE(cp);
        CHECK(dp.best_makespan == es.best_makespan);
        CHECK(dp.work_count > 0);
        // recovered permutation really derives the reported schedule
        CHECK(metrics(derive(inst, dp.best_permutation)).makespan == dp.best_makespan);
    }
}

TEST_CASE("dp prunes against the exhaustive node count") {
    auto inst = generate_instance(config_of(9, 3, 0.4, 7));
    auto dp = solve_dp(inst);
    // 9! = 362880 full permutations; the level-wise scan stays well below
    CHECK(dp.work_count < 362880);
}

TEST_CASE("dp guard") {
    ProblemInstance zero;
    CHECK_THROWS_AS(solve_dp(zero), std::invalid_argument);
}

TEST_CASE("sa params validation") {
    SaParams params;
    params.t_max = 0.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);

    params = SaParams{};
    params.cooling = Cooling::Geometric;
    params.r = 1.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);

    params = SaParams{};
    params.cooling = Cooling::Slow;
    params.beta = 0.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);

    params = SaParams{};
    params.t_halt = 200.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);

    params = SaParams{};
    params.a = -1.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}

TEST_CASE("sa halt threshold defaults per cooling") {
    SaParams linear;
    linear.cooling = Cooling::Linear;
    CHECK(linear.resolved_t_halt() == 0.0);
    SaParams geometric;
    geometric.cooling = Cooling::Geometric;
    CHECK(geometric.resolved_t_halt() == 1e-3);
    SaParams slow;
    slow.cooling = Cooling::Slow;
    CHECK(slow.resolved_t_halt() == 1e-3);
}

TEST_CASE("sa proposes exactly t_max/a moves under linear cooling") {
    auto inst = generate_instance(config_of(6, 2, 0.4, 3));
    SaParams params;
    params.t_max = 50.0;
    params.a = 0.1;
    params.cooling = Cooling::Linear;
    params.rng_seed = 1;
    auto result = solve_sa(inst, params);
    CHECK(result.work_count == 500);
}

TEST_CASE("sa on a fully conflicting instance returns the length sum") {
    auto inst = generate_instance(config_of(7, 3, 1.0, 21));
    SaParams params;
    params.t_max = 10.0;
    params.a = 0.5;
    params.rng_seed = 2;
    auto result = solve_sa(inst, params);
    CHECK(result.best_makespan == inst.total_length());
}

TEST_CASE("sa is deterministic under its seed and never beats the optimum") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 15; ++round) {
        const int n = 5 + static_cast<int>(rng() % 4);
        auto inst = generate_instance(config_of(n, 3, 0.4, rng()));
        SaParams params;
        params.t_max = 20.0;
        params.a = 0.05;
        params.rng_seed = rng();

        auto a = solve_sa(inst, params);
        auto b = solve_sa(inst, params);
        CHECK(a.best_makespan == b.best_makespan);
        CHECK(a.best_permutation.order == b.best_permutation.order);

        auto optimum = solve_exhaustive(inst).best_makespan;
        CHECK(a.best_makespan >= optimum);
    }
}

TEST_CASE("sa best-seen trace is non-increasing") {
    auto inst = generate_instance(config_of(9, 3, 0.3, 12));
    SaParams params;
    params.t_max = 50.0;
    params.a = 0.02;
    params.rng_seed = 5;
    double last_best = std::numeric_limits<double>::infinity();
    bool monotone = true;
    params.observer = [&](long long, double, double best) {
        monotone = monotone && best <= last_best;
        last_best = best;
    };
    auto result = solve_sa(inst, params);
    CHECK(monotone);
    CHECK(result.best_makespan == last_best);
}

TEST_CASE("sa geometric and slow cooling halt") {
    auto inst = generate_instance(config_of(5, 2, 0.2, 8));
    SaParams geometric;
    geometric.cooling = Cooling::Geometric;
    geometric.t_max = 100.0;
    geometric.r = 0.9;
    geometric.rng_seed = 4;
    auto g = solve_sa(inst, geometric);
    // 100 * 0.9^k <= 1e-3 first at k = 110
    CHECK(g.work_count == 110);

    SaParams slow;
    slow.cooling = Cooling::Slow;
    slow.t_max = 10.0;
    slow.beta = 0.05;
    slow.rng_seed = 4;
    auto s = solve_sa(inst, slow);
    CHECK(s.work_count > 0);
    CHECK(s.best_makespan >= solve_exhaustive(inst).best_makespan);
}

TEST_CASE("sa requires two jobs") {
    auto one = make_instance({3}, 2);
    CHECK_THROWS_AS(solve_sa(one, SaParams{}), std::invalid_argument);
}

TEST_CASE("exhaustive search equals the assignment-order brute force") {
    std::mt19937_64 rng(2718);
    for (int round = 0; round < 25; ++round) {
        const int n = 3 + static_cast<int>(rng() % 4);  // 3..6
        const int m = 2 + static_cast<int>(rng() % 2);
        const double cp = static_cast<double>(rng() % 6) / 5.0;
        auto inst = generate_instance(config_of(n, m, cp, rng()));
        CAPTURE(n);
        CAPTURE(m);
        CAPTURE(cp);
        CHECK(solve_exhaustive(inst).best_makespan == oracles::brute_force_optimum(inst));
    }
}

TEST_CASE("dp equals the partition oracle on conflict-free instances") {
    std::mt19937_64 rng(31415);
    for (int round = 0; round < 20; ++round) {
        const int n = 5 + static_cast<int>(rng() % 5);
        const int m = 2 + static_cast<int>(rng() % 3);
        auto inst = generate_instance(config_of(n, m, 0.0, rng()));
        CHECK(solve_dp(inst).best_makespan == oracles::partition_optimum(inst.lengths, m));
    }
}
