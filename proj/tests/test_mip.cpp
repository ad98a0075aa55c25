#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "txnsp/instance.hpp"
#include "txnsp/mip.hpp"
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

std::size_t count_rows(const MipModel& model, const std::string& prefix) {
    std::size_t count = 0;
    for (const MipRow& row : model.rows)
        if (row.name.rfind(prefix, 0) == 0) ++count;
    return count;
}

}  // namespace

TEST_CASE("model shape for n=3, m=2") {
    auto inst = make_instance({4, 3, 2}, 2, {{0, 1}});
    auto model = emit_mip(inst);
    CHECK(model.variable_count() == 16);  // 1 + 3 + 6 + 6
    CHECK(model.continuous_vars.size() == 4);
    CHECK(model.binary_vars.size() == 12);
    CHECK(count_rows(model, "c4_") == 3);
    CHECK(count_rows(model, "c5_") == 3);
    CHECK(count_rows(model, "c6_") == 6);
    CHECK(count_rows(model, "c7_") == 6);
    CHECK(count_rows(model, "c8_") == 1);
    CHECK(model.big_M == 9.0);
}

TEST_CASE("single-job model and witness") {
    auto inst = make_instance({5}, 2);
    auto model = emit_mip(inst);
    CHECK(count_rows(model, "c4_") == 1);
    CHECK(count_rows(model, "c5_") == 1);
    CHECK(count_rows(model, "c6_") == 0);

    MipSolution sol;
    sol.ms = 5.0;
    sol.starts = {0.0};
    sol.assign = {{1.0, 0.0}};
    CHECK(validate_mip_solution(inst, sol).ok);
}

TEST_CASE("fully conflicting triple has three c8 rows") {
    auto inst = make_instance({1, 2, 3}, 2, {{0, 1}, {0, 2}, {1, 2}});
    auto model = emit_mip(inst);
    CHECK(count_rows(model, "c8_") == 3);

    // serialized witness is valid and attains the length sum
    auto schedule = derive(inst, identity_permutation(3));
    auto sol = schedule_to_solution(inst, schedule);
    CHECK(sol.ms == 6.0);
    CHECK(validate_mip_solution(inst, sol).ok);
}

TEST_CASE("lp text sections and re-parse identity") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 20; ++round) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const int m = 1 + static_cast<int>(rng() % 3);
        const double cp = n >= 2 ? static_cast<double>(rng() % 5) / 4.0 : 0.0;
        auto inst = generate_instance(config_of(n, m, cp, rng()));
        auto model = emit_mip(inst);
        std::string text = to_lp_text(model);

        CHECK(text.rfind("Minimize\n", 0) == 0);
        CHECK(text.find("Subject To\n") != std::string::npos);
        CHECK(text.find("Bounds\n") != std::string::npos);
        CHECK(text.find("Binary\n") != std::string::npos);
        CHECK(text.find("End\n") != std::string::npos);

        auto reparsed = parse_lp_text(text);
        CHECK(reparsed == model);
        if (n >= 2) CHECK(reparsed.big_M == model.big_M);
    }
}

TEST_CASE("es witness validates on random instances") {
    std::mt19937_64 rng(12);
    for (int round = 0; round < 25; ++round) {
        const int n = 2 + static_cast<int>(rng() % 6);
        const int m = 2 + static_cast<int>(rng() % 3);
        auto inst = generate_instance(config_of(n, m, static_cast<double>(rng() % 5) / 4.0, rng()));
        auto es = solve_exhaustive(inst);
        auto sol = schedule_to_solution(inst, es.best_schedule);
        auto verdict = validate_mip_solution(inst, sol);
        CAPTURE(verdict.violations);
        CHECK(verdict.ok);
        CHECK(sol.ms == es.best_makespan);
    }
}

TEST_CASE("overlapping conflicting jobs are reported") {
    auto inst = make_instance({4, 3}, 2, {{0, 1}});
    MipSolution sol;
    sol.ms = 4.0;
    sol.starts = {0.0, 0.0};  // both start at once despite the conflict
    sol.assign = {{1.0, 0.0}, {0.0, 1.0}};
    auto verdict = validate_mip_solution(inst, sol);
    CHECK_FALSE(verdict.ok);
    bool saw_c8 = false;
    for (const auto& v : verdict.violations) saw_c8 = saw_c8 || v.rfind("c8_", 0) == 0;
    CHECK(saw_c8);
}

TEST_CASE("same-machine overlap is reported via c7") {
    auto inst = make_instance({4, 3}, 2);
    MipSolution sol;
    sol.ms = 4.0;
    sol.starts = {0.0, 1.0};
    sol.assign = {{1.0, 0.0}, {1.0, 0.0}};  // both on machine 0, overlapping
    auto verdict = validate_mip_solution(inst, sol);
    CHECK_FALSE(verdict.ok);
    bool saw_c7 = false;
    for (const auto& v : verdict.violations) saw_c7 = saw_c7 || v.rfind("c7_", 0) == 0;
    CHECK(saw_c7);
}

TEST_CASE("double assignment violates c5") {
    auto inst = make_instance({4, 3}, 2);
    MipSolution sol;
    sol.ms = 4.0;
    sol.starts = {0.0, 0.0};
    sol.assign = {{1.0, 1.0}, {0.0, 1.0}};
    auto verdict = validate_mip_solution(inst, sol);
    CHECK_FALSE(verdict.ok);
    bool saw_c5 = false;
    for (const auto& v : verdict.violations) saw_c5 = saw_c5 || v.rfind("c5_", 0) == 0;
    CHECK(saw_c5);
}

TEST_CASE("validator rejects shape mismatches") {
    auto inst = make_instance({4, 3}, 2);
    MipSolution sol;
    sol.ms = 4.0;
    sol.starts = {0.0};
    sol.assign = {{1.0, 0.0}, {0.0, 1.0}};
    CHECK_THROWS_AS(validate_mip_solution(inst, sol), std::invalid_argument);
}

TEST_CASE("solution json round trip") {
    MipSolution sol;
    sol.ms = 6.5;
    sol.starts = {0.0, 2.5};
    sol.assign = {{1.0, 0.0}, {0.0, 1.0}};
    auto back = read_solution_json(write_solution_json(sol));
    CHECK(back.ms == sol.ms);
    CHECK(back.starts == sol.starts);
    CHECK(back.assign == sol.assign);
}
