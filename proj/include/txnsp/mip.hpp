#pragma once

#include <optional>
#include <string>
#include <vector>

#include "txnsp/instance.hpp"
#include "txnsp/schedule.hpp"

namespace txnsp {

struct LinearTerm {
    std::string var;
    double coeff = 0.0;

    bool operator==(const LinearTerm&) const = default;
};

struct MipRow {
    std::string name;
    std::vector<LinearTerm> terms;
    char sense = '>';  // '>' means >=, '=' means equality
    double rhs = 0.0;

    bool operator==(const MipRow&) const = default;
};

// Mixed-integer model for an instance: minimize the makespan subject to
// job-cover, assignment, big-M sequencing, same-machine precedence, and
// conflict precedence rows. Variable names are stable: ms, s_i, x_i_j,
// pre_i_k. Row names key the constraint families: c4_i, c5_i, c6_i_k,
// c7_i_k_j, c8_i_k.
struct MipModel {
    std::string objective_var = "ms";
    std::vector<MipRow> rows;
    std::vector<std::string> continuous_vars;  // ms and the s_i, bounded >= 0
    std::vector<std::string> binary_vars;      // x_i_j then pre_i_k
    double big_M = 0.0;                        // derivable from the c6 rows

    std::size_t variable_count() const { return continuous_vars.size() + binary_vars.size(); }

    // big_M intentionally excluded: it is embedded in the c6 coefficients
    bool operator==(const MipModel& other) const {
        return objective_var == other.objective_var && rows == other.rows &&
               continuous_vars == other.continuous_vars && binary_vars == other.binary_vars;
    }
};

// Builds the model; big_M defaults to the sum of job lengths.
MipModel emit_mip(const ProblemInstance& instance, std::optional<double> big_M = std::nullopt);

// CPLEX-LP text with sections Minimize, Subject To, Bounds, Binary, End.
std::string to_lp_text(const MipModel& model);

// Parses LP text produced by to_lp_text back into a model.
MipModel parse_lp_text(const std::string& text);

// A candidate solver solution: machine assignment, start times, makespan.
struct MipSolution {
    double ms = 0.0;
    std::vector<double> starts;               // n
    std::vector<std::vector<double>> assign;  // n x m
};

struct MipValidation {
    bool ok = true;
    std::vector<std::string> violations;
};

// Checks a solution against every constraint family with tolerance 1e-6;
// precedence indicators are reconstructed from the start times.
MipValidation validate_mip_solution(const ProblemInstance& instance, const MipSolution& solution,
                                    std::optional<double> big_M = std::nullopt);

// Converts a (sub)schedule into the (x, s, ms) triple the validator takes.
MipSolution schedule_to_solution(const ProblemInstance& instance, const Subschedule& schedule);

// JSON round-trip for solution files: {"ms":…,"s":[…],"x":[[…]]}
MipSolution read_solution_json(const std::string& text);
std::string write_solution_json(const MipSolution& solution);

}  // namespace txnsp
