// Command-line front end: instance generation, the four solvers, the
// search-space analyzer, the solver evaluation harness, MIP emission and
// validation, and the factory-floor benchmark.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ffbench/factory.hpp"
#include "txnsp/analysis.hpp"
#include "txnsp/instance.hpp"
#include "txnsp/mip.hpp"
#include "txnsp/rng.hpp"
#include "txnsp/solvers.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitGuard = 3;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int env_workers() {
    const char* env = std::getenv("TXNSP_WORKERS");
    if (!env) return 0;
    return std::atoi(env);
}

// "n=9,m=3,cp=0.4[,mu=1000,sigma=100]"
txnsp::InstanceConfig parse_gen_spec(const std::string& spec, std::uint64_t seed) {
    txnsp::InstanceConfig config;
    config.rng_seed = seed;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad --gen entry (want key=value): " + item);
        std::string key = item.substr(0, eq);
        double value = std::strtod(item.c_str() + eq + 1, nullptr);
        if (key == "n") config.n = static_cast<int>(value);
        else if (key == "m") config.m = static_cast<int>(value);
        else if (key == "cp") config.conflict_parity = value;
        else if (key == "mu") config.length_mean = value;
        else if (key == "sigma") config.length_stddev = value;
        else if (key == "seed") config.rng_seed = static_cast<std::uint64_t>(value);
        else throw std::invalid_argument("unknown --gen key: " + key);
    }
    return config;
}

txnsp::SaParams parse_sa_flags(const std::string& cooling, double tmax, double a, double r,
                               double beta, double thalt, std::uint64_t seed) {
    txnsp::SaParams params;
    params.t_max = tmax;
    params.a = a;
    params.r = r;
    params.beta = beta;
    params.rng_seed = seed;
    if (cooling == "linear") params.cooling = txnsp::Cooling::Linear;
    else if (cooling == "geometric") params.cooling = txnsp::Cooling::Geometric;
    else if (cooling == "slow") params.cooling = txnsp::Cooling::Slow;
    else throw std::invalid_argument("unknown cooling: " + cooling);
    if (thalt >= 0.0) params.t_halt = thalt;
    return params;
}

ffbench::ConflictLevel parse_level(const std::string& name) {
    if (name == "very_low") return ffbench::ConflictLevel::VeryLow;
    if (name == "low") return ffbench::ConflictLevel::Low;
    if (name == "medium") return ffbench::ConflictLevel::Medium;
    if (name == "high") return ffbench::ConflictLevel::High;
    if (name == "very_high") return ffbench::ConflictLevel::VeryHigh;
    throw std::invalid_argument("unknown conflict level: " + name);
}

nlohmann::json result_json(const std::string& solver, const txnsp::SolverResult& result) {
    return {{"solver", solver},
            {"makespan", result.best_makespan},
            {"permutation", result.best_permutation.order},
            {"wall_ms", result.wall_time.count() * 1000.0},
            {"work_count", result.work_count}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transaction scheduling toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "master seed for all randomness")->capture_default_str();

    // gen -----------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a random instance");
    int gen_n = 9, gen_m = 3;
    double gen_cp = 0.2, gen_mu = 1000.0, gen_sigma = 100.0;
    std::string gen_out = "instance.json";
    gen->add_option("--n", gen_n, "job count")->capture_default_str();
    gen->add_option("--m", gen_m, "machine count")->capture_default_str();
    gen->add_option("--cp", gen_cp, "conflict parity in [0,1]")->capture_default_str();
    gen->add_option("--mu", gen_mu, "length mean")->capture_default_str();
    gen->add_option("--sigma", gen_sigma, "length stddev")->capture_default_str();
    gen->add_option("--out", gen_out, "output instance file")->capture_default_str();

    // solve ---------------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "solve an instance");
    std::string solve_instance, solve_gen, solver = "dp", cooling = "linear", solve_out;
    double sa_tmax = 100.0, sa_a = 0.01, sa_r = 0.99, sa_beta = 1e-3, sa_thalt = -1.0;
    bool force = false;
    int threads = 0;
    solve->add_option("instance", solve_instance, "instance file (json)");
    solve->add_option("--gen", solve_gen, "generate instead: n=..,m=..,cp=..[,mu=..,sigma=..]");
    solve->add_option("--solver", solver, "es | dp | sa")->capture_default_str();
    solve->add_option("--cooling", cooling, "sa cooling: linear | geometric | slow")->capture_default_str();
    solve->add_option("--tmax", sa_tmax, "sa initial temperature")->capture_default_str();
    solve->add_option("--a", sa_a, "sa linear decrement")->capture_default_str();
    solve->add_option("--r", sa_r, "sa geometric ratio")->capture_default_str();
    solve->add_option("--beta", sa_beta, "sa slow cooling rate")->capture_default_str();
    solve->add_option("--thalt", sa_thalt, "sa halt threshold (negative: cooling default)");
    solve->add_flag("--force", force, "lift the exhaustive-search size guard");
    solve->add_option("--threads", threads, "worker threads (0: all, env TXNSP_WORKERS overrides)");
    solve->add_option("--out", solve_out, "write result json here too");

    // emit-mip ------------------------------------------------------------
    auto* emit = app.add_subcommand("emit-mip", "emit the LP model for an instance");
    std::string emit_instance, emit_out = "model.lp", emit_validate;
    double big_m = -1.0;
    emit->add_option("instance", emit_instance, "instance file (json)")->required();
    emit->add_option("--big-m", big_m, "big-M constant (default: sum of lengths)");
    emit->add_option("--out", emit_out, "output LP file")->capture_default_str();
    emit->add_option("--validate", emit_validate, "check a solver solution json against the model");

    // analyze -------------------------------------------------------------
    auto* analyze = app.add_subcommand("analyze", "search-space ratio analysis over cp");
    txnsp::AnalysisConfig analysis;
    std::string analyze_out = "analysis.csv", thresholds_flag;
    analyze->add_option("--n", analysis.n, "job count")->capture_default_str();
    analyze->add_option("--m", analysis.m, "machine count")->capture_default_str();
    analyze->add_option("--mu", analysis.length_mean, "length mean")->capture_default_str();
    analyze->add_option("--sigma", analysis.length_stddev, "length stddev")->capture_default_str();
    analyze->add_option("--grid", analysis.grid_points, "cp grid points")->capture_default_str();
    analyze->add_option("--per-point", analysis.instances_per_point, "instances per grid point")
        ->capture_default_str();
    analyze->add_option("--thresholds", thresholds_flag, "comma list, must start at 0");
    analyze->add_option("--workers", analysis.threads, "worker threads");
    analyze->add_option("--out", analyze_out, "output csv")->capture_default_str();

    // evaluate ------------------------------------------------------------
    auto* evaluate = app.add_subcommand("evaluate", "solver accuracy/duration evaluation");
    std::string preset = "table2-desk", evaluate_out = "evaluation.csv";
    int eval_instances = 0, eval_workers = 0;
    evaluate->add_option("--preset", preset, "table2-desk | table2-paper")->capture_default_str();
    evaluate->add_option("--instances", eval_instances, "override instances per configuration");
    evaluate->add_option("--workers", eval_workers, "worker threads");
    evaluate->add_option("--out", evaluate_out, "output csv")->capture_default_str();

    // bench ---------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "factory floor benchmark");
    std::string bench_preset = "desk", bench_level = "very_low", bench_out = "bench.csv",
                bench_json;
    int bench_threads = 0, bench_jobs = 0, bench_batch = 0, bench_reps = 5;
    double bench_speed = 0.0;
    bool compare = false, bench_trigger = false, bench_no_opt = false;
    bench->add_option("--preset", bench_preset, "desk | paper")->capture_default_str();
    bench->add_option("--level", bench_level, "very_low | low | medium | high | very_high")
        ->capture_default_str();
    bench->add_option("--threads", bench_threads, "executor thread count");
    bench->add_option("--speed", bench_speed, "simulation speed multiplier");
    bench->add_option("--jobs", bench_jobs, "job count");
    bench->add_option("--batch", bench_batch, "scheduler batch size");
    bench->add_flag("--trigger", bench_trigger, "dispatch partial batches when a worker idles");
    bench->add_flag("--no-optimize", bench_no_opt, "disable transaction scheduling");
    bench->add_flag("--compare", compare, "run the optimized-vs-baseline comparison");
    bench->add_option("--reps", bench_reps, "job sets per comparison")->capture_default_str();
    bench->add_option("--out", bench_out, "comparison csv")->capture_default_str();
    bench->add_option("--json", bench_json, "full json dump");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen) {
            txnsp::InstanceConfig config;
            config.n = gen_n;
            config.m = gen_m;
            config.conflict_parity = gen_cp;
            config.length_mean = gen_mu;
            config.length_stddev = gen_sigma;
            config.rng_seed = seed;
            txnsp::ProblemInstance instance = txnsp::generate_instance(config);
            txnsp::save_instance_file(instance, gen_out);
            std::cout << "wrote " << gen_out << " (n=" << instance.n << ", m=" << instance.m
                      << ", cp=" << (instance.n >= 2 ? txnsp::conflict_parity(instance) : 0.0)
                      << ")\n";
        } else if (*solve) {
            txnsp::ProblemInstance instance;
            if (!solve_gen.empty())
                instance = txnsp::generate_instance(parse_gen_spec(solve_gen, seed));
            else if (!solve_instance.empty())
                instance = txnsp::load_instance_file(solve_instance);
            else
                throw std::invalid_argument("solve: give an instance file or --gen");

            if (threads == 0) threads = env_workers();
            txnsp::SolverResult result;
            if (solver == "es") {
                txnsp::EsOptions options;
                options.force = force;
                options.threads = threads;
                result = txnsp::solve_exhaustive(instance, options);
            } else if (solver == "dp") {
                result = txnsp::solve_dp(instance);
            } else if (solver == "sa") {
                result = txnsp::solve_sa(
                    instance, parse_sa_flags(cooling, sa_tmax, sa_a, sa_r, sa_beta, sa_thalt,
                                             txnsp::derive_seed(seed, "sa")));
            } else {
                throw std::invalid_argument("unknown solver: " + solver);
            }
            std::string text = result_json(solver, result).dump(2) + "\n";
            std::cout << text;
            if (!solve_out.empty()) write_file(solve_out, text);
        } else if (*emit) {
            txnsp::ProblemInstance instance = txnsp::load_instance_file(emit_instance);
            std::optional<double> M;
            if (big_m > 0.0) M = big_m;
            txnsp::MipModel model = txnsp::emit_mip(instance, M);
            write_file(emit_out, txnsp::to_lp_text(model));
            std::cout << "wrote " << emit_out << " (" << model.variable_count() << " variables, "
                      << model.rows.size() << " constraints)\n";
            if (!emit_validate.empty()) {
                txnsp::MipSolution solution = txnsp::read_solution_json(read_file(emit_validate));
                txnsp::MipValidation verdict = txnsp::validate_mip_solution(instance, solution, M);
                if (verdict.ok) {
                    std::cout << "solution valid (ms=" << solution.ms << ")\n";
                } else {
                    std::cout << "solution INVALID:\n";
                    for (const std::string& violation : verdict.violations)
                        std::cout << "  " << violation << "\n";
                    return kExitUsage;
                }
            }
        } else if (*analyze) {
            analysis.seed = seed;
            if (analysis.threads == 0) analysis.threads = env_workers();
            if (!thresholds_flag.empty()) {
                analysis.thresholds.clear();
                std::istringstream in(thresholds_flag);
                std::string item;
                while (std::getline(in, item, ',')) analysis.thresholds.push_back(std::strtod(item.c_str(), nullptr));
            }
            txnsp::AnalysisCurve curve = txnsp::analyze_search_space(analysis);
            write_file(analyze_out, txnsp::write_analysis_csv(curve));
            std::cout << "wrote " << analyze_out << " (" << curve.cp_grid.size() << " cp points x "
                      << analysis.thresholds.size() << " thresholds)\n";
        } else if (*evaluate) {
            std::vector<txnsp::EvaluationConfig> configs;
            int instances = 0;
            std::vector<int> n_values, m_values;
            std::vector<double> cp_values = {0.2, 0.4, 0.6, 0.8};
            if (preset == "table2-desk") {
                n_values = {9};
                m_values = {3, 4};
                instances = 100;
            } else if (preset == "table2-paper") {
                n_values = {8, 9, 10};
                m_values = {3, 4};
                instances = 1000;
            } else {
                throw std::invalid_argument("unknown preset: " + preset);
            }
            if (eval_instances > 0) instances = eval_instances;
            for (int n : n_values)
                for (int m : m_values)
                    for (double cp : cp_values) configs.push_back({n, m, cp, 1000.0, 100.0});

            std::vector<txnsp::SolverSpec> specs;
            txnsp::SolverSpec dp;
            dp.kind = txnsp::SolverSpec::Kind::Dp;
            specs.push_back(dp);
            auto sa_spec = [](double tmax, txnsp::Cooling cooling, double value) {
                txnsp::SolverSpec spec;
                spec.kind = txnsp::SolverSpec::Kind::Sa;
                spec.sa.t_max = tmax;
                spec.sa.cooling = cooling;
                if (cooling == txnsp::Cooling::Linear) spec.sa.a = value;
                else spec.sa.r = value;
                return spec;
            };
            if (preset == "table2-paper") {
                for (double tmax : {50.0, 100.0}) {
                    specs.push_back(sa_spec(tmax, txnsp::Cooling::Linear, 0.1));
                    specs.push_back(sa_spec(tmax, txnsp::Cooling::Linear, 0.01));
                    specs.push_back(sa_spec(tmax, txnsp::Cooling::Geometric, 0.9));
                    specs.push_back(sa_spec(tmax, txnsp::Cooling::Geometric, 0.99));
                }
            } else {
                specs.push_back(sa_spec(100.0, txnsp::Cooling::Linear, 0.1));
                specs.push_back(sa_spec(100.0, txnsp::Cooling::Linear, 0.01));
                specs.push_back(sa_spec(100.0, txnsp::Cooling::Geometric, 0.9));
                specs.push_back(sa_spec(100.0, txnsp::Cooling::Geometric, 0.99));
            }
            if (eval_workers == 0) eval_workers = env_workers();
            std::vector<txnsp::EvaluationRow> rows =
                txnsp::evaluate_solvers(configs, specs, instances, seed, eval_workers);
            write_file(evaluate_out, txnsp::write_evaluation_csv(rows));
            std::cout << "wrote " << evaluate_out << " (" << rows.size() << " rows, " << instances
                      << " instances per configuration)\n";
        } else if (*bench) {
            ffbench::BenchConfig config =
                bench_preset == "paper" ? ffbench::paper_config() : ffbench::desk_config();
            if (bench_preset != "paper" && bench_preset != "desk")
                throw std::invalid_argument("unknown preset: " + bench_preset);
            config.conflict_level = parse_level(bench_level);
            if (bench_threads > 0) config.thread_count = bench_threads;
            if (bench_speed > 0.0) config.simulation_speed = bench_speed;
            if (bench_jobs > 0) config.job_count = bench_jobs;
            if (bench_batch > 0) config.batch_size = bench_batch;
            config.trigger = bench_trigger;
            config.optimization = !bench_no_opt;
            config.seed = seed;

            if (compare) {
                ffbench::ComparisonOptions options;
                options.repetitions = bench_reps;
                ffbench::ComparisonResult result = ffbench::compare_optimized(config, options);
                write_file(bench_out, ffbench::write_comparison_csv({result}));
                if (!bench_json.empty()) write_file(bench_json, ffbench::write_comparison_json(result));
                const ffbench::ComboStats& best = result.combos[result.best_combo];
                std::cout << "baseline " << result.base_mean_throughput << " jobs/s; best batch="
                          << best.batch_size << " trigger=" << (best.trigger ? "true" : "false")
                          << " -> " << best.mean_throughput << " jobs/s (mean improvement "
                          << best.mean_improvement_pct << "%)\n"
                          << "wrote " << bench_out << "\n";
            } else {
                ffbench::BenchReport report = ffbench::run_benchmark(config);
                std::string text = ffbench::write_bench_report_json(config, report);
                std::cout << text;
                if (!bench_json.empty()) write_file(bench_json, text);
            }
        }
    } catch (const txnsp::InstanceTooLarge& e) {
        std::cerr << "guard violation: " << e.what() << "\n";
        return kExitGuard;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
