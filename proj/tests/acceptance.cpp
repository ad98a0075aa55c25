// Acceptance suite: one pass/fail line per criterion. Each criterion is
// self-contained and pins its tolerances in code; run with a list of
// criterion numbers to select a subset.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include "ffbench/factory.hpp"
#include "oracles.hpp"
#include "txnsp/analysis.hpp"
#include "txnsp/instance.hpp"
#include "txnsp/mip.hpp"
#include "txnsp/rng.hpp"
#include "txnsp/schedule.hpp"
#include "txnsp/solvers.hpp"

using namespace txnsp;

namespace {

constexpr std::uint64_t kSeed = 20250809;

InstanceConfig config_of(int n, int m, double cp, std::uint64_t seed) {
    InstanceConfig config;
    config.n = n;
    config.m = m;
    config.conflict_parity = cp;
    config.length_mean = 1000.0;
    config.length_stddev = 100.0;
    config.rng_seed = seed;
    return config;
}

// 1. DP matches ES exactly across the evaluation grid.
bool criterion_exact_agreement(std::string& detail) {
    const double cps[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    int mismatches = 0;
    for (int i = 0; i < 200; ++i) {
        const int n = 6 + i % 4;
        const int m = 2 + (i / 4) % 3;
        const double cp = cps[(i / 12) % 6];
        auto inst = generate_instance(config_of(n, m, cp, derive_seed(kSeed, "c1", i)));
        auto es = solve_exhaustive(inst);
        auto dp = solve_dp(inst);
        if (dp.best_makespan != es.best_makespan) ++mismatches;
    }
    detail = "200 instances, " + std::to_string(mismatches) + " mismatches";
    return mismatches == 0;
}

// 2. ES equals an independent enumerator over machine assignments and
//    per-machine orders.
bool criterion_oracle_equivalence(std::string& detail) {
    const double cps[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    int mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = 3 + i % 4;  // 3..6
        const int m = 2 + i % 2;
        const double cp = cps[i % 6];
        auto inst = generate_instance(config_of(n, m, cp, derive_seed(kSeed, "c2", i)));
        if (solve_exhaustive(inst).best_makespan != oracles::brute_force_optimum(inst))
            ++mismatches;
    }
    detail = "100 instances, " + std::to_string(mismatches) + " mismatches";
    return mismatches == 0;
}

// 3. Fully conflicting instances are solved exactly by every solver.
bool criterion_cp1(std::string& detail) {
    int failures = 0;
    for (int i = 0; i < 50; ++i) {
        const int n = 2 + i % 7;
        const int m = 1 + i % 4;
        auto inst = generate_instance(config_of(n, m, 1.0, derive_seed(kSeed, "c3", i)));
        const double total = inst.total_length();
        if (solve_exhaustive(inst).best_makespan != total) ++failures;
        if (solve_dp(inst).best_makespan != total) ++failures;
        if (n >= 2) {
            SaParams sa;
            sa.t_max = 10.0 + static_cast<double>(i % 3) * 45.0;
            sa.cooling = static_cast<Cooling>(i % 3);
            sa.rng_seed = derive_seed(kSeed, "c3sa", i);
            if (solve_sa(inst, sa).best_makespan != total) ++failures;
        }
    }
    detail = "50 instances x {es,dp,sa}, " + std::to_string(failures) + " failures";
    return failures == 0;
}

// 4. Conflict-free instances reduce to multiway partitioning.
bool criterion_cp0_partition(std::string& detail) {
    int mismatches = 0;
    for (int i = 0; i < 50; ++i) {
        const int n = 5 + i % 5;  // 5..9
        const int m = 2 + i % 3;
        auto inst = generate_instance(config_of(n, m, 0.0, derive_seed(kSeed, "c4", i)));
        if (solve_dp(inst).best_makespan != oracles::partition_optimum(inst.lengths, m))
            ++mismatches;
    }
    detail = "50 instances, " + std::to_string(mismatches) + " mismatches";
    return mismatches == 0;
}

// 5. SA with t_max=100, linear a=0.01 reaches >= 90% accuracy at
//    n=9, m=4, cp=0.2.
bool criterion_sa_quality(std::string& detail) {
    int hits = 0;
    const int total = 200;
    for (int i = 0; i < total; ++i) {
        auto inst = generate_instance(config_of(9, 4, 0.2, derive_seed(kSeed, "c5", i)));
        auto es = solve_exhaustive(inst);
        SaParams sa;
        sa.t_max = 100.0;
        sa.cooling = Cooling::Linear;
        sa.a = 0.01;
        sa.rng_seed = derive_seed(kSeed, "c5sa", i);
        if (solve_sa(inst, sa).best_makespan == es.best_makespan) ++hits;
    }
    const double accuracy = static_cast<double>(hits) / total;
    char buf[96];
    std::snprintf(buf, sizeof buf, "accuracy %.1f%% (threshold 90%%)", accuracy * 100.0);
    detail = buf;
    return accuracy >= 0.90;
}

// 6. Analyzer shape: cp=1 ratios equal 1, optimal-ratio minimum at
//    cp > 0, threshold monotonicity everywhere.
bool criterion_analyzer_shape(std::string& detail) {
    AnalysisConfig config;
    config.n = 9;
    config.m = 3;
    config.length_mean = 1000.0;
    config.length_stddev = 100.0;
    config.grid_points = 11;
    config.instances_per_point = 100;
    config.seed = derive_seed(kSeed, "c6");
    auto curve = analyze_search_space(config);

    bool cp1_exact = true;
    for (double ratio : curve.ratios.back()) cp1_exact = cp1_exact && ratio == 1.0;

    std::size_t argmin = 0;
    for (std::size_t g = 1; g < curve.cp_grid.size(); ++g)
        if (curve.ratios[g][0] < curve.ratios[argmin][0]) argmin = g;
    const bool min_above_zero = curve.cp_grid[argmin] > 0.0;

    bool monotone = true;
    for (const auto& row : curve.ratios)
        for (std::size_t t = 1; t < row.size(); ++t) monotone = monotone && row[t] >= row[t - 1];

    char buf[128];
    std::snprintf(buf, sizeof buf, "cp1-exact=%s, min at cp=%.1f, monotone=%s",
                  cp1_exact ? "yes" : "no", curve.cp_grid[argmin], monotone ? "yes" : "no");
    detail = buf;
    return cp1_exact && min_above_zero && monotone;
}

// 7. ES witnesses validate against the MIP families and the LP text
//    re-parses to an identical model.
bool criterion_mip_round_trip(std::string& detail) {
    const double cps[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    int failures = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = 2 + i % 7;  // 2..8
        const int m = 2 + i % 3;
        auto inst = generate_instance(config_of(n, m, cps[i % 6], derive_seed(kSeed, "c7", i)));
        auto es = solve_exhaustive(inst);
        auto solution = schedule_to_solution(inst, es.best_schedule);
        if (!validate_mip_solution(inst, solution).ok) ++failures;
        if (solution.ms != es.best_makespan) ++failures;
        auto model = emit_mip(inst);
        if (!(parse_lp_text(to_lp_text(model)) == model)) ++failures;
    }
    detail = "100 instances, " + std::to_string(failures) + " failures";
    return failures == 0;
}

// 8. Factory floor desk preset: every run at every conflict level
//    completes all jobs with zero violations, clean lock protocol, and
//    no watchdog flags.
bool criterion_engine_safety(std::string& detail) {
    const ffbench::ConflictLevel levels[] = {
        ffbench::ConflictLevel::VeryLow, ffbench::ConflictLevel::Low,
        ffbench::ConflictLevel::Medium, ffbench::ConflictLevel::High,
        ffbench::ConflictLevel::VeryHigh};
    int failures = 0;
    int runs = 0;
    for (ffbench::ConflictLevel level : levels) {
        for (int rep = 0; rep < 10; ++rep) {
            ffbench::BenchConfig config = ffbench::desk_config();
            config.conflict_level = level;
            config.seed = derive_seed(kSeed, "c8", static_cast<std::uint64_t>(level) * 100 +
                                                       static_cast<std::uint64_t>(rep));
            auto report = ffbench::run_benchmark(config);
            ++runs;
            const bool ok = report.jobs_completed == config.job_count &&
                            report.engine.violations == 0 && report.engine.watchdog_flags == 0 &&
                            report.lock_audit.clean();
            if (!ok) ++failures;
        }
    }
    detail = std::to_string(runs) + " runs (5 levels x 10 seeds), " + std::to_string(failures) +
             " failures";
    return failures == 0;
}

// 9. Scheduling pays: optimized throughput beats the baseline on paired
//    job sets (mean improvement strictly positive).
bool criterion_scheduling_improvement(std::string& detail) {
    ffbench::BenchConfig config = ffbench::desk_config();
    config.conflict_level = ffbench::ConflictLevel::VeryLow;
    config.seed = derive_seed(kSeed, "c9");

    ffbench::ComparisonOptions options;
    options.batch_sizes = {50};
    options.triggers = {false};
    options.repetitions = 5;
    auto result = ffbench::compare_optimized(config, options);
    const auto& combo = result.combos.front();

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "base %.3f jobs/s, optimized %.3f jobs/s, improvements min %.2f%% mean %.2f%%",
                  result.base_mean_throughput, combo.mean_throughput, combo.min_improvement_pct,
                  combo.mean_improvement_pct);
    detail = buf;
    return combo.mean_improvement_pct > 0.0;
}

// 10. Lock-protocol shape across a 10^4-transaction randomized stress.
bool criterion_lock_protocol(std::string& detail) {
    optima::SystemDefinition def;
    optima::PluginDescriptor station;
    for (optima::PluginId id = 0; id < 6; ++id) {
        optima::PluginDescriptor plugin;
        plugin.id = id;
        plugin.name = "station_" + std::to_string(id);
        plugin.shareable = false;
        def.plugins.push_back(plugin);
    }
    optima::RoleDescriptor role;
    role.id = 0;
    role.name = "crew";
    role.plugin_permissions = {0, 1, 2, 3, 4, 5};
    role.can_halt = true;
    role.initial_count = 8;
    role.max_count = 8;
    def.roles.push_back(role);
    optima::TransactionTemplate tmpl;
    tmpl.id = 0;
    tmpl.name = "work";
    tmpl.owner_role = 0;
    def.templates.push_back(tmpl);
    def.params.optimization = false;
    def.params.thread_count = 4;
    def.params.batch_size = 1;

    std::map<std::string, optima::TemplateCallbacks> bindings;
    bindings["work"].body = [](optima::TransactionContext& ctx) {
        for (optima::PluginId plugin : ctx.transaction().nonshareable_locks) ctx.use_plugin(plugin);
    };

    optima::Engine engine(def, bindings);
    std::mt19937_64 rng(derive_seed(kSeed, "c10"));
    std::vector<optima::TransactionRequest> initial;
    for (int i = 0; i < 10000; ++i) {
        optima::TransactionRequest request;
        request.template_id = 0;
        for (optima::PluginId plugin = 0; plugin < 6; ++plugin)
            if (rng() % 3 == 0) request.extra_plugins.insert(plugin);
        initial.push_back(request);
    }
    auto report = engine.run(initial);
    auto audit = optima::audit_lock_events(engine.lock_manager().snapshot_event_log());

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%lld transactions, %lld order violations, %lld pairing violations, committed %lld",
                  audit.transactions, audit.order_violations, audit.pairing_violations,
                  report.committed);
    detail = buf;
    return audit.transactions == 10000 && audit.clean() && report.committed == 10000 &&
           report.violations == 0;
}

struct Criterion {
    int number;
    const char* name;
    bool (*run)(std::string&);
};

}  // namespace

int main(int argc, char** argv) {
    const Criterion criteria[] = {
        {1, "exact-solver agreement (dp == es on the evaluation grid)", criterion_exact_agreement},
        {2, "brute-force oracle equivalence (n <= 6)", criterion_oracle_equivalence},
        {3, "cp=1 instances solved exactly by every solver", criterion_cp1},
        {4, "cp=0 partition equivalence", criterion_cp0_partition},
        {5, "sa accuracy >= 90% at n=9, m=4, cp=0.2", criterion_sa_quality},
        {6, "analyzer shape (cp=1 exact, interior minimum, monotone)", criterion_analyzer_shape},
        {7, "mip validation and lp round trip", criterion_mip_round_trip},
        {8, "engine safety across all conflict levels", criterion_engine_safety},
        {9, "scheduling improvement strictly positive", criterion_scheduling_improvement},
        {10, "lock protocol shape under randomized stress", criterion_lock_protocol},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        if (!selected.empty() && !selected.count(criterion.number)) continue;
        auto started = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::printf("%s  criterion %2d: %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", criterion.number,
                    criterion.name, detail.c_str(), seconds);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
