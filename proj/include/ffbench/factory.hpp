#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optima/engine.hpp"

namespace ffbench {

// 9 action types: 5 manual, 2 drilling, 2 welding
enum class ActionKind {
    Manual1, Manual2, Manual3, Manual4, Manual5,
    Drill1, Drill2,
    Weld1, Weld2,
};

inline bool is_drilling(ActionKind kind) { return kind == ActionKind::Drill1 || kind == ActionKind::Drill2; }
inline bool is_welding(ActionKind kind) { return kind == ActionKind::Weld1 || kind == ActionKind::Weld2; }

enum class ConflictLevel { VeryLow, Low, Medium, High, VeryHigh };

struct PropensityWeights {
    int manual = 1;
    int drilling = 1;
    int welding = 1;
};

PropensityWeights propensity(ConflictLevel level);
const char* conflict_level_name(ConflictLevel level);

// Mean action durations in seconds at 1x simulation speed. Invented
// defaults; every value is configurable. Samples use sigma = 20% of the
// mean, redrawn until positive.
struct ActionDurations {
    double manual = 0.200;
    double drilling = 0.300;
    double welding = 0.400;
    double transport = 0.150;
    double inspection = 0.250;
    double sigma_fraction = 0.20;
};

struct BenchConfig {
    int thread_count = 4;
    double simulation_speed = 20.0;
    ConflictLevel conflict_level = ConflictLevel::VeryLow;
    int job_count = 100;
    int batch_size = 50;
    bool trigger = false;
    bool optimization = true;

    int worker_initial = 20, transporter_initial = 7, inspector_initial = 7;
    int worker_max = 24, transporter_max = 10, inspector_max = 10;

    int min_operations = 2, max_operations = 5;
    int min_actions = 2, max_actions = 4;
    ActionDurations durations;

    double manager_period = 0.5;  // simulated seconds between floor-manager checks
    std::uint64_t seed = 0;

    txnsp::SaParams scheduling_sa;  // batch scheduling settings

    BenchConfig() {
        scheduling_sa.t_max = 100.0;
        scheduling_sa.cooling = txnsp::Cooling::Linear;
        scheduling_sa.a = 0.05;
    }

    void validate() const;
};

// CI-scale configuration (small agent pool, 100 jobs, 4 threads).
BenchConfig desk_config();
// Full-scale configuration matching the published protocol (100/35/35
// agents, 500 jobs).
BenchConfig paper_config();

struct JobAction {
    ActionKind kind = ActionKind::Manual1;
    double duration = 0.0;  // seconds at 1x speed
};

struct JobOperation {
    std::vector<JobAction> actions;
    bool uses_drill() const;
    bool uses_weld() const;
};

struct JobDescription {
    int job_id = 0;
    std::vector<JobOperation> operations;
    double transport_duration = 0.0;
    double inspection_duration = 0.0;
};

// Deterministic under config.seed; action kinds drawn by the conflict
// level's propensity weights.
std::vector<JobDescription> generate_jobs(const BenchConfig& config);

struct BenchReport {
    optima::EngineReport engine;
    int jobs_generated = 0;
    int jobs_completed = 0;
    double throughput = 0.0;  // completed jobs per wall second
    optima::LockAudit lock_audit;
};

BenchReport run_benchmark(const BenchConfig& config);
BenchReport run_benchmark(const BenchConfig& config, const std::vector<JobDescription>& jobs);

std::string write_bench_report_json(const BenchConfig& config, const BenchReport& report);

// Optimized-vs-baseline comparison over paired seeded job sets.
struct ComparisonOptions {
    std::vector<int> batch_sizes = {50, 75};
    std::vector<bool> triggers = {false, true};
    int repetitions = 5;
};

struct ComboStats {
    int batch_size = 0;
    bool trigger = false;
    double mean_throughput = 0.0;
    double min_improvement_pct = 0.0;
    double max_improvement_pct = 0.0;
    double mean_improvement_pct = 0.0;
    std::vector<double> improvements_pct;  // one per job set
};

struct ComparisonResult {
    BenchConfig config;
    double base_mean_throughput = 0.0;
    std::vector<double> base_throughputs;
    std::vector<ComboStats> combos;
    std::size_t best_combo = 0;  // by mean throughput
};

ComparisonResult compare_optimized(const BenchConfig& config, const ComparisonOptions& options);

// csv columns: threads,speed,conflict_level,base_throughput,best_batch_size,
// best_trigger,opt_throughput,min_improvement_pct,max_improvement_pct,
// mean_improvement_pct
std::string write_comparison_csv(const std::vector<ComparisonResult>& rows);
std::string write_comparison_json(const ComparisonResult& result);

}  // namespace ffbench
