#include "txnsp/instance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "txnsp/rng.hpp"
#include <json.hpp>

namespace txnsp {

long long ConflictMatrix::pair_count() const {
    long long total = 0;
    for (int i = 0; i < n_; ++i)
        for (std::size_t w = 0; w < words_; ++w)
            total += std::popcount(row(i)[w]);
    return total / 2;
}

double ProblemInstance::total_length() const {
    double sum = 0.0;
    for (double len : lengths) sum += len;
    return sum;
}

void ProblemInstance::validate() const {
    if (n < 0) throw std::invalid_argument("instance: n must be non-negative");
    if (m < 1) throw std::invalid_argument("instance: m must be positive");
    if (static_cast<int>(lengths.size()) != n)
        throw std::invalid_argument("instance: lengths size must equal n");
    for (double len : lengths)
        if (!(len > 0.0)) throw std::invalid_argument("instance: job lengths must be strictly positive");
    if (conflicts.size() != n)
        throw std::invalid_argument("instance: conflict matrix size must equal n");
    for (int i = 0; i < n; ++i) {
        if (conflicts.at(i, i)) throw std::invalid_argument("instance: conflict diagonal must be zero");
        for (int j = i + 1; j < n; ++j)
            if (conflicts.at(i, j) != conflicts.at(j, i))
                throw std::invalid_argument("instance: conflict matrix must be symmetric");
    }
}

void Permutation::validate(int n) const {
    if (static_cast<int>(order.size()) != n)
        throw std::invalid_argument("permutation: wrong number of entries");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int job : order) {
        if (job < 0 || job >= n || seen[static_cast<std::size_t>(job)])
            throw std::invalid_argument("permutation: entries must cover 0..n-1 exactly once");
        seen[static_cast<std::size_t>(job)] = 1;
    }
}

Permutation identity_permutation(int n) {
    Permutation p;
    p.order.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p.order[static_cast<std::size_t>(i)] = i;
    return p;
}

void InstanceConfig::validate() const {
    if (n < 0) throw std::invalid_argument("config: n must be non-negative");
    if (m < 1) throw std::invalid_argument("config: m must be positive");
    if (!(length_mean > 0.0)) throw std::invalid_argument("config: length mean must be positive");
    if (length_stddev < 0.0) throw std::invalid_argument("config: length stddev must be non-negative");
    if (conflict_parity < 0.0 || conflict_parity > 1.0)
        throw std::invalid_argument("config: conflict parity must lie in [0,1]");
}

double conflict_parity(const ProblemInstance& instance) {
    if (instance.n < 2)
        throw std::invalid_argument("conflict parity undefined for fewer than two jobs");
    double pairs = 0.5 * instance.n * (instance.n - 1);
    return static_cast<double>(instance.conflicts.pair_count()) / pairs;
}

namespace {

// Quantize lengths to a 2^-20 grid. Every schedule time is then a sum of
// exactly representable values, so makespans of distinct solver paths
// compare exactly (sums up to ~2^33 grid units fit a double mantissa).
double quantize_length(double x) {
    return std::round(x * 0x1p20) * 0x1p-20;
}

}  // namespace

ProblemInstance generate_instance(const InstanceConfig& config) {
    config.validate();
    ProblemInstance inst;
    inst.n = config.n;
    inst.m = config.m;
    inst.conflicts = ConflictMatrix(config.n);
    inst.lengths.resize(static_cast<std::size_t>(config.n));

    NormalSampler lengths_rng(derive_seed(config.rng_seed, "lengths"));
    for (int i = 0; i < config.n; ++i) {
        double len = 0.0;
        do {
            len = quantize_length(lengths_rng(config.length_mean, config.length_stddev));
        } while (!(len > 0.0));
        inst.lengths[static_cast<std::size_t>(i)] = len;
    }

    if (config.n >= 2) {
        const long long all_pairs = static_cast<long long>(config.n) * (config.n - 1) / 2;
        const long long want = std::llround(config.conflict_parity * static_cast<double>(all_pairs));
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(static_cast<std::size_t>(all_pairs));
        for (int i = 0; i < config.n; ++i)
            for (int j = i + 1; j < config.n; ++j) pairs.emplace_back(i, j);
        std::mt19937_64 conflict_rng(derive_seed(config.rng_seed, "conflicts"));
        // partial Fisher-Yates: the first `want` slots are a uniform
        // sample of unordered pairs without replacement
        for (long long k = 0; k < want; ++k) {
            std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), pairs.size() - 1);
            std::swap(pairs[static_cast<std::size_t>(k)], pairs[pick(conflict_rng)]);
            inst.conflicts.set(pairs[static_cast<std::size_t>(k)].first,
                               pairs[static_cast<std::size_t>(k)].second);
        }
    }
    inst.validate();
    return inst;
}

std::string write_instance_json(const ProblemInstance& instance) {
    nlohmann::json j;
    j["n"] = instance.n;
    j["m"] = instance.m;
    j["lengths"] = instance.lengths;
    std::vector<std::vector<int>> pairs;
    for (int i = 0; i < instance.n; ++i)
        for (int k = i + 1; k < instance.n; ++k)
            if (instance.conflicts.at(i, k)) pairs.push_back({i, k});
    j["conflicts"] = pairs;
    return j.dump(2) + "\n";
}

ProblemInstance read_instance_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ProblemInstance inst;
    inst.n = j.at("n").get<int>();
    inst.m = j.at("m").get<int>();
    inst.lengths = j.at("lengths").get<std::vector<double>>();
    inst.conflicts = ConflictMatrix(inst.n);
    for (const auto& pair : j.at("conflicts")) {
        if (!pair.is_array() || pair.size() != 2)
            throw std::invalid_argument("instance json: conflict entries must be [i,j] pairs");
        int a = pair[0].get<int>();
        int b = pair[1].get<int>();
        if (a < 0 || a >= inst.n || b < 0 || b >= inst.n || a == b)
            throw std::invalid_argument("instance json: conflict pair out of range");
        inst.conflicts.set(a, b);
    }
    inst.validate();
    return inst;
}

ProblemInstance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_instance_json(buf.str());
}

void save_instance_file(const ProblemInstance& instance, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << write_instance_json(instance);
}

}  // namespace txnsp
