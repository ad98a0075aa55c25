#include "txnsp/mip.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

namespace txnsp {

namespace {

constexpr double kTol = 1e-6;
constexpr double kPreEps = 1e-9;

std::string var_s(int i) { return "s_" + std::to_string(i); }
std::string var_x(int i, int j) { return "x_" + std::to_string(i) + "_" + std::to_string(j); }
std::string var_pre(int i, int k) { return "pre_" + std::to_string(i) + "_" + std::to_string(k); }

// shortest decimal that parses back to the same double
std::string format_number(double value) {
    char buf[64];
    for (int precision : {15, 16, 17}) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

}  // namespace

MipModel emit_mip(const ProblemInstance& instance, std::optional<double> big_M) {
    instance.validate();
    if (instance.n < 1) throw std::invalid_argument("mip model requires n >= 1");
    const int n = instance.n;
    const int m = instance.m;

    MipModel model;
    model.big_M = big_M.value_or(instance.total_length());

    model.continuous_vars.push_back("ms");
    for (int i = 0; i < n; ++i) model.continuous_vars.push_back(var_s(i));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) model.binary_vars.push_back(var_x(i, j));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (i != k) model.binary_vars.push_back(var_pre(i, k));

    // ms >= s_i + L_i
    for (int i = 0; i < n; ++i) {
        MipRow row;
        row.name = "c4_" + std::to_string(i);
        row.terms = {{"ms", 1.0}, {var_s(i), -1.0}};
        row.sense = '>';
        row.rhs = instance.lengths[static_cast<std::size_t>(i)];
        model.rows.push_back(std::move(row));
    }
    // each job on exactly one machine
    for (int i = 0; i < n; ++i) {
        MipRow row;
        row.name = "c5_" + std::to_string(i);
        for (int j = 0; j < m; ++j) row.terms.push_back({var_x(i, j), 1.0});
        row.sense = '=';
        row.rhs = 1.0;
        model.rows.push_back(std::move(row));
    }
    // s_i + M(1 - pre_ik) >= s_k + L_k, i.e. job k precedes job i
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            if (i == k) continue;
            MipRow row;
            row.name = "c6_" + std::to_string(i) + "_" + std::to_string(k);
            row.terms = {{var_s(i), 1.0}, {var_s(k), -1.0}, {var_pre(i, k), -model.big_M}};
            row.sense = '>';
            row.rhs = instance.lengths[static_cast<std::size_t>(k)] - model.big_M;
            model.rows.push_back(std::move(row));
        }
    }
    // sharing a machine forces an order
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) {
            for (int j = 0; j < m; ++j) {
                MipRow row;
                row.name = "c7_" + std::to_string(i) + "_" + std::to_string(k) + "_" + std::to_string(j);
                row.terms = {{var_pre(i, k), 1.0},
                             {var_pre(k, i), 1.0},
                             {var_x(i, j), -1.0},
                             {var_x(k, j), -1.0}};
                row.sense = '>';
                row.rhs = -1.0;
                model.rows.push_back(std::move(row));
            }
        }
    }
    // conflicting pairs force an order
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) {
            if (!instance.conflicts.at(i, k)) continue;
            MipRow row;
            row.name = "c8_" + std::to_string(i) + "_" + std::to_string(k);
            row.terms = {{var_pre(i, k), 1.0}, {var_pre(k, i), 1.0}};
            row.sense = '>';
            row.rhs = 1.0;
            model.rows.push_back(std::move(row));
        }
    }
    return model;
}

std::string to_lp_text(const MipModel& model) {
    std::ostringstream out;
    out << "Minimize\n obj: " << model.objective_var << "\n";
    out << "Subject To\n";
    for (const MipRow& row : model.rows) {
        out << " " << row.name << ":";
        for (const LinearTerm& term : row.terms) {
            if (term.coeff >= 0.0)
                out << " + ";
            else
                out << " - ";
            double mag = std::fabs(term.coeff);
            if (mag != 1.0) out << format_number(mag) << " ";
            out << term.var;
        }
        out << (row.sense == '=' ? " = " : " >= ") << format_number(row.rhs) << "\n";
    }
    out << "Bounds\n";
    for (const std::string& var : model.continuous_vars) out << " " << var << " >= 0\n";
    out << "Binary\n";
    for (const std::string& var : model.binary_vars) out << " " << var << "\n";
    out << "End\n";
    return out.str();
}

namespace {

bool is_section_header(const std::string& line, const char* word) {
    return line == word;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

MipRow parse_row(const std::string& line) {
    MipRow row;
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("lp parse: constraint without name: " + line);
    row.name = trim(line.substr(0, colon));

    std::istringstream in(line.substr(colon + 1));
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) tokens.push_back(tok);

    std::size_t pos = 0;
    double sign = 1.0;
    bool have_sign = false;
    while (pos < tokens.size()) {
        const std::string& t = tokens[pos];
        if (t == ">=" || t == "=" || t == "<=") {
            row.sense = (t == "=") ? '=' : '>';
            if (t == "<=") throw std::invalid_argument("lp parse: unexpected <= row");
            if (pos + 1 >= tokens.size()) throw std::invalid_argument("lp parse: missing rhs");
            row.rhs = std::strtod(tokens[pos + 1].c_str(), nullptr);
            pos += 2;
            if (pos != tokens.size()) throw std::invalid_argument("lp parse: trailing tokens");
            return row;
        }
        if (t == "+") {
            sign = 1.0;
            have_sign = true;
            ++pos;
            continue;
        }
        if (t == "-") {
            sign = -1.0;
            have_sign = true;
            ++pos;
            continue;
        }
        char* endp = nullptr;
        double value = std::strtod(t.c_str(), &endp);
        if (endp != t.c_str() && *endp == '\0') {
            // explicit coefficient, variable follows
            if (pos + 1 >= tokens.size()) throw std::invalid_argument("lp parse: dangling coefficient");
            row.terms.push_back({tokens[pos + 1], (have_sign ? sign : 1.0) * value});
            pos += 2;
        } else {
            row.terms.push_back({t, have_sign ? sign : 1.0});
            ++pos;
        }
        sign = 1.0;
        have_sign = false;
    }
    throw std::invalid_argument("lp parse: constraint missing sense: " + line);
}

}  // namespace

MipModel parse_lp_text(const std::string& text) {
    MipModel model;
    model.continuous_vars.clear();
    model.binary_vars.clear();

    enum class Section { None, Minimize, SubjectTo, Bounds, Binary, End };
    Section section = Section::None;

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        std::string line = trim(raw);
        if (line.empty() || line[0] == '\\') continue;
        if (is_section_header(line, "Minimize")) { section = Section::Minimize; continue; }
        if (is_section_header(line, "Subject To")) { section = Section::SubjectTo; continue; }
        if (is_section_header(line, "Bounds")) { section = Section::Bounds; continue; }
        if (is_section_header(line, "Binary")) { section = Section::Binary; continue; }
        if (is_section_header(line, "End")) { section = Section::End; continue; }

        switch (section) {
            case Section::Minimize: {
                std::size_t colon = line.find(':');
                model.objective_var = trim(colon == std::string::npos ? line : line.substr(colon + 1));
                break;
            }
            case Section::SubjectTo:
                model.rows.push_back(parse_row(line));
                break;
            case Section::Bounds: {
                std::istringstream bound(line);
                std::string var, sense, value;
                bound >> var >> sense >> value;
                if (sense != ">=" || value != "0")
                    throw std::invalid_argument("lp parse: unexpected bound: " + line);
                model.continuous_vars.push_back(var);
                break;
            }
            case Section::Binary:
                model.binary_vars.push_back(line);
                break;
            case Section::None:
            case Section::End:
                throw std::invalid_argument("lp parse: content outside sections: " + line);
        }
    }

    // recover big_M from any c6 row (coefficient of its pre term)
    for (const MipRow& row : model.rows) {
        if (row.name.rfind("c6_", 0) == 0) {
            for (const LinearTerm& term : row.terms)
                if (term.var.rfind("pre_", 0) == 0) model.big_M = -term.coeff;
            break;
        }
    }
    return model;
}

MipSolution schedule_to_solution(const ProblemInstance& instance, const Subschedule& schedule) {
    MipSolution sol;
    sol.ms = metrics(schedule).makespan;
    sol.starts.resize(static_cast<std::size_t>(instance.n), 0.0);
    sol.assign.assign(static_cast<std::size_t>(instance.n),
                      std::vector<double>(static_cast<std::size_t>(instance.m), 0.0));
    for (int job = 0; job < instance.n; ++job) {
        const Placement& p = schedule.placements[static_cast<std::size_t>(job)];
        if (p.machine < 0) throw std::invalid_argument("schedule_to_solution requires a full schedule");
        sol.starts[static_cast<std::size_t>(job)] = p.start;
        sol.assign[static_cast<std::size_t>(job)][static_cast<std::size_t>(p.machine)] = 1.0;
    }
    return sol;
}

MipValidation validate_mip_solution(const ProblemInstance& instance, const MipSolution& solution,
                                    std::optional<double> big_M) {
    instance.validate();
    const int n = instance.n;
    const int m = instance.m;
    if (static_cast<int>(solution.starts.size()) != n)
        throw std::invalid_argument("validate: starts must have length n");
    if (static_cast<int>(solution.assign.size()) != n)
        throw std::invalid_argument("validate: assignment must be n x m");
    for (const auto& row : solution.assign)
        if (static_cast<int>(row.size()) != m)
            throw std::invalid_argument("validate: assignment must be n x m");

    const double M = big_M.value_or(instance.total_length());
    MipValidation out;
    auto flag = [&out](std::string message) {
        out.ok = false;
        out.violations.push_back(std::move(message));
    };

    const auto& s = solution.starts;
    const auto& L = instance.lengths;

    for (int i = 0; i < n; ++i) {
        if (s[static_cast<std::size_t>(i)] < -kTol)
            flag("c9_" + std::to_string(i) + ": negative start time");
        for (int j = 0; j < m; ++j) {
            double x = solution.assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (std::fabs(x - std::round(x)) > kTol)
                flag("c10_" + std::to_string(i) + "_" + std::to_string(j) + ": x not binary");
        }
    }

    double max_completion = 0.0;
    for (int i = 0; i < n; ++i) {
        double completion = s[static_cast<std::size_t>(i)] + L[static_cast<std::size_t>(i)];
        max_completion = std::max(max_completion, completion);
        if (solution.ms + kTol < completion)
            flag("c4_" + std::to_string(i) + ": ms below job completion");
    }
    if (std::fabs(solution.ms - max_completion) > kTol)
        flag("obj: ms does not equal the latest completion");

    for (int i = 0; i < n; ++i) {
        double assigned = 0.0;
        for (int j = 0; j < m; ++j)
            assigned += solution.assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (std::fabs(assigned - 1.0) > kTol)
            flag("c5_" + std::to_string(i) + ": job not assigned to exactly one machine");
    }

    // pre_ik = 1 iff job k completes before job i starts
    auto pre = [&](int i, int k) {
        return s[static_cast<std::size_t>(i)] >=
                       s[static_cast<std::size_t>(k)] + L[static_cast<std::size_t>(k)] - kPreEps
                   ? 1.0
                   : 0.0;
    };

    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            if (i == k) continue;
            double lhs = s[static_cast<std::size_t>(i)] + M * (1.0 - pre(i, k));
            if (lhs + kTol < s[static_cast<std::size_t>(k)] + L[static_cast<std::size_t>(k)])
                flag("c6_" + std::to_string(i) + "_" + std::to_string(k) + ": precedence violated");
        }
    }

    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) {
            for (int j = 0; j < m; ++j) {
                double xi = solution.assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                double xk = solution.assign[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                if (pre(i, k) + pre(k, i) + kTol < xi + xk - 1.0)
                    flag("c7_" + std::to_string(i) + "_" + std::to_string(k) + "_" + std::to_string(j) +
                         ": jobs overlap on a shared machine");
            }
            if (instance.conflicts.at(i, k) && pre(i, k) + pre(k, i) + kTol < 1.0)
                flag("c8_" + std::to_string(i) + "_" + std::to_string(k) +
                     ": conflicting jobs overlap");
        }
    }
    return out;
}

MipSolution read_solution_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    MipSolution sol;
    sol.ms = j.at("ms").get<double>();
    sol.starts = j.at("s").get<std::vector<double>>();
    sol.assign = j.at("x").get<std::vector<std::vector<double>>>();
    return sol;
}

std::string write_solution_json(const MipSolution& solution) {
    nlohmann::json j;
    j["ms"] = solution.ms;
    j["s"] = solution.starts;
    j["x"] = solution.assign;
    return j.dump(2) + "\n";
}

}  // namespace txnsp
