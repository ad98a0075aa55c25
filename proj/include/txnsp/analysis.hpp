#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "txnsp/instance.hpp"
#include "txnsp/solvers.hpp"

namespace txnsp {

// Search-space analysis: for each conflict parity on an even grid,
// enumerate every representable schedule of sampled instances and record
// the fraction with makespan within each relative-excess threshold of
// the optimum, averaged over instances.
struct AnalysisConfig {
    int n = 9;
    int m = 3;
    double length_mean = 1000.0;
    double length_stddev = 100.0;
    int grid_points = 11;
    int instances_per_point = 100;
    std::vector<double> thresholds = {0.0, 0.01, 0.05, 0.10, 0.20};
    std::uint64_t seed = 0;
    int threads = 0;  // 0: library default

    void validate() const;
};

struct AnalysisCurve {
    AnalysisConfig config;
    std::vector<double> cp_grid;
    // ratios[cp_index][threshold_index], averaged across instances
    std::vector<std::vector<double>> ratios;
};

AnalysisCurve analyze_search_space(const AnalysisConfig& config);

// csv columns: n,m,mu,sigma,cp,threshold,ratio
std::string write_analysis_csv(const AnalysisCurve& curve);

// Solver evaluation: per configuration, the fraction of instances where
// a solver reproduces the exhaustive-search makespan, plus mean solve
// duration.
struct EvaluationConfig {
    int n = 9;
    int m = 3;
    double conflict_parity = 0.2;
    double length_mean = 1000.0;
    double length_stddev = 100.0;
};

struct SolverSpec {
    enum class Kind { Dp, Sa };
    Kind kind = Kind::Dp;
    SaParams sa;          // used when kind == Sa
    std::string name() const;
    std::string params_label() const;
};

struct EvaluationRow {
    EvaluationConfig config;
    std::string solver;
    std::string params;
    double accuracy = 0.0;
    double mean_ms = 0.0;
};

std::vector<EvaluationRow> evaluate_solvers(const std::vector<EvaluationConfig>& configs,
                                            const std::vector<SolverSpec>& specs,
                                            int instances_per_config, std::uint64_t seed,
                                            int threads = 0);

// csv columns: n,m,cp,mu,sigma,solver,params,accuracy,mean_ms
std::string write_evaluation_csv(const std::vector<EvaluationRow>& rows);

}  // namespace txnsp
