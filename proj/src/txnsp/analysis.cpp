#include "txnsp/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "txnsp/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace txnsp {

namespace {

constexpr int kAnalyzeGuard = 10;

int resolve_threads(int requested) {
    if (requested > 0) return requested;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::string format_field(double value) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

// per-instance threshold ratios over the n! permutation space
std::vector<double> instance_ratios(const ProblemInstance& instance,
                                    const std::vector<double>& thresholds,
                                    std::vector<double>& makespans, DeriveScratch& scratch) {
    const std::uint64_t total = factorial(instance.n);
    makespans.clear();
    makespans.reserve(total);

    std::vector<int> perm(static_cast<std::size_t>(instance.n));
    for (int i = 0; i < instance.n; ++i) perm[static_cast<std::size_t>(i)] = i;
    double optimum = std::numeric_limits<double>::infinity();
    do {
        double ms = derive_makespan(instance, perm.data(), instance.n, scratch);
        makespans.push_back(ms);
        optimum = std::min(optimum, ms);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<double> ratios(thresholds.size(), 0.0);
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
        const double cutoff = (1.0 + thresholds[t]) * optimum;
        std::uint64_t count = 0;
        for (double ms : makespans)
            if (ms <= cutoff) ++count;
        ratios[t] = static_cast<double>(count) / static_cast<double>(total);
    }
    return ratios;
}

}  // namespace

void AnalysisConfig::validate() const {
    if (n < 2) throw std::invalid_argument("analysis: n must be at least 2");
    if (n > kAnalyzeGuard)
        throw InstanceTooLarge("analysis enumerates n! schedules; refused for n > 10");
    if (m < 1) throw std::invalid_argument("analysis: m must be positive");
    if (grid_points < 2) throw std::invalid_argument("analysis: grid needs at least 2 points");
    if (instances_per_point < 1) throw std::invalid_argument("analysis: need at least one instance per point");
    if (thresholds.empty() || thresholds.front() != 0.0)
        throw std::invalid_argument("analysis: thresholds must start at 0");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw std::invalid_argument("analysis: thresholds must be ascending");
}

AnalysisCurve analyze_search_space(const AnalysisConfig& config) {
    config.validate();
    AnalysisCurve curve;
    curve.config = config;
    curve.cp_grid.resize(static_cast<std::size_t>(config.grid_points));
    for (int g = 0; g < config.grid_points; ++g)
        curve.cp_grid[static_cast<std::size_t>(g)] =
            static_cast<double>(g) / static_cast<double>(config.grid_points - 1);

    const int per_point = config.instances_per_point;
    const std::size_t threshold_count = config.thresholds.size();
    curve.ratios.assign(static_cast<std::size_t>(config.grid_points),
                        std::vector<double>(threshold_count, 0.0));

    const int threads = resolve_threads(config.threads);
    for (int g = 0; g < config.grid_points; ++g) {
        // one slot per instance so the reduction order is fixed no matter
        // how the loop is scheduled
        std::vector<std::vector<double>> slots(static_cast<std::size_t>(per_point));
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
#endif
        {
            DeriveScratch scratch;
            std::vector<double> makespans;
#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
            for (int i = 0; i < per_point; ++i) {
                InstanceConfig ic;
                ic.n = config.n;
                ic.m = config.m;
                ic.length_mean = config.length_mean;
                ic.length_stddev = config.length_stddev;
                ic.conflict_parity = curve.cp_grid[static_cast<std::size_t>(g)];
                ic.rng_seed = derive_seed(config.seed, "analysis", static_cast<std::uint64_t>(g),
                                          static_cast<std::uint64_t>(i));
                ProblemInstance instance = generate_instance(ic);
                scratch.prepare(instance);
                slots[static_cast<std::size_t>(i)] =
                    instance_ratios(instance, config.thresholds, makespans, scratch);
            }
        }
        for (int i = 0; i < per_point; ++i)
            for (std::size_t t = 0; t < threshold_count; ++t)
                curve.ratios[static_cast<std::size_t>(g)][t] += slots[static_cast<std::size_t>(i)][t];
        for (std::size_t t = 0; t < threshold_count; ++t)
            curve.ratios[static_cast<std::size_t>(g)][t] /= static_cast<double>(per_point);
    }
    return curve;
}

std::string write_analysis_csv(const AnalysisCurve& curve) {
    std::ostringstream out;
    out << "n,m,mu,sigma,cp,threshold,ratio\n";
    for (std::size_t g = 0; g < curve.cp_grid.size(); ++g) {
        for (std::size_t t = 0; t < curve.config.thresholds.size(); ++t) {
            out << curve.config.n << ',' << curve.config.m << ','
                << format_field(curve.config.length_mean) << ','
                << format_field(curve.config.length_stddev) << ','
                << format_field(curve.cp_grid[g]) << ','
                << format_field(curve.config.thresholds[t]) << ','
                << format_field(curve.ratios[g][t]) << '\n';
        }
    }
    return out.str();
}

std::string SolverSpec::name() const { return kind == Kind::Dp ? "dp" : "sa"; }

std::string SolverSpec::params_label() const {
    if (kind == Kind::Dp) return "-";
    std::ostringstream out;
    out << "tmax=" << format_field(sa.t_max);
    switch (sa.cooling) {
        case Cooling::Linear: out << ";linear;a=" << format_field(sa.a); break;
        case Cooling::Geometric: out << ";geometric;r=" << format_field(sa.r); break;
        case Cooling::Slow: out << ";slow;beta=" << format_field(sa.beta); break;
    }
    return out.str();
}

std::vector<EvaluationRow> evaluate_solvers(const std::vector<EvaluationConfig>& configs,
                                            const std::vector<SolverSpec>& specs,
                                            int instances_per_config, std::uint64_t seed,
                                            int threads) {
    if (instances_per_config < 1)
        throw std::invalid_argument("evaluation: need at least one instance per config");

    std::vector<EvaluationRow> rows;
    const int worker_count = resolve_threads(threads);

    for (std::size_t c = 0; c < configs.size(); ++c) {
        const EvaluationConfig& config = configs[c];
        struct InstanceOutcome {
            std::vector<char> matched;      // per spec
            std::vector<double> elapsed_ms; // per spec
        };
        std::vector<InstanceOutcome> slots(static_cast<std::size_t>(instances_per_config));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(worker_count)
#endif
        for (int i = 0; i < instances_per_config; ++i) {
            InstanceConfig ic;
            ic.n = config.n;
            ic.m = config.m;
            ic.length_mean = config.length_mean;
            ic.length_stddev = config.length_stddev;
            ic.conflict_parity = config.conflict_parity;
            ic.rng_seed = derive_seed(seed, "evaluate", c, static_cast<std::uint64_t>(i));
            ProblemInstance instance = generate_instance(ic);

            EsOptions es_options;
            es_options.threads = 1;  // instances fan out instead
            SolverResult baseline = solve_exhaustive(instance, es_options);

            InstanceOutcome& slot = slots[static_cast<std::size_t>(i)];
            slot.matched.resize(specs.size(), 0);
            slot.elapsed_ms.resize(specs.size(), 0.0);
            for (std::size_t sidx = 0; sidx < specs.size(); ++sidx) {
                SolverResult result;
                if (specs[sidx].kind == SolverSpec::Kind::Dp) {
                    result = solve_dp(instance);
                } else {
                    SaParams params = specs[sidx].sa;
                    params.rng_seed = derive_seed(seed, "sa", c * 1000 + sidx,
                                                  static_cast<std::uint64_t>(i));
                    result = solve_sa(instance, params);
                }
                slot.matched[sidx] = result.best_makespan == baseline.best_makespan ? 1 : 0;
                slot.elapsed_ms[sidx] = result.wall_time.count() * 1000.0;
            }
        }

        for (std::size_t sidx = 0; sidx < specs.size(); ++sidx) {
            EvaluationRow row;
            row.config = config;
            row.solver = specs[sidx].name();
            row.params = specs[sidx].params_label();
            long long matches = 0;
            double total_ms = 0.0;
            for (const InstanceOutcome& slot : slots) {
                matches += slot.matched[sidx];
                total_ms += slot.elapsed_ms[sidx];
            }
            row.accuracy = static_cast<double>(matches) / static_cast<double>(instances_per_config);
            row.mean_ms = total_ms / static_cast<double>(instances_per_config);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string write_evaluation_csv(const std::vector<EvaluationRow>& rows) {
    std::ostringstream out;
    out << "n,m,cp,mu,sigma,solver,params,accuracy,mean_ms\n";
    for (const EvaluationRow& row : rows) {
        out << row.config.n << ',' << row.config.m << ','
            << format_field(row.config.conflict_parity) << ','
            << format_field(row.config.length_mean) << ','
            << format_field(row.config.length_stddev) << ','
            << row.solver << ',' << row.params << ','
            << format_field(row.accuracy) << ','
            << format_field(row.mean_ms) << '\n';
    }
    return out.str();
}

}  // namespace txnsp
