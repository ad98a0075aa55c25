#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace txnsp {

// Thrown when a solver guard refuses an instance (search space too big).
struct InstanceTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Symmetric boolean conflict relation stored as bitset rows so the hot
// scheduling kernels can AND a job's row against the placed set.
class ConflictMatrix {
public:
    ConflictMatrix() = default;
    explicit ConflictMatrix(int n)
        : n_(n), words_(static_cast<std::size_t>((n + 63) / 64)),
          rows_(static_cast<std::size_t>(n) * words_, 0) {}

    int size() const { return n_; }
    std::size_t words_per_row() const { return words_; }

    bool at(int i, int j) const {
        return (row(i)[static_cast<std::size_t>(j) >> 6] >> (j & 63)) & 1ULL;
    }

    void set(int i, int j, bool v = true) {
        if (i == j) throw std::invalid_argument("conflict matrix: diagonal must stay zero");
        set_bit(i, j, v);
        set_bit(j, i, v);
    }

    const std::uint64_t* row(int i) const { return rows_.data() + static_cast<std::size_t>(i) * words_; }

    // number of conflicting unordered pairs
    long long pair_count() const;

    bool operator==(const ConflictMatrix&) const = default;

private:
    void set_bit(int i, int j, bool v) {
        std::uint64_t& w = rows_[static_cast<std::size_t>(i) * words_ + (static_cast<std::size_t>(j) >> 6)];
        if (v) w |= 1ULL << (j & 63); else w &= ~(1ULL << (j & 63));
    }

    int n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> rows_;
};

// One scheduling problem: n jobs with positive lengths on m identical
// machines, with a symmetric zero-diagonal conflict relation.
struct ProblemInstance {
    int n = 0;
    int m = 1;
    std::vector<double> lengths;
    ConflictMatrix conflicts;

    double total_length() const;
    void validate() const;  // throws std::invalid_argument on violation
};

struct Permutation {
    std::vector<int> order;

    int size() const { return static_cast<int>(order.size()); }
    // throws std::invalid_argument unless order is a bijection on 0..n-1
    void validate(int n) const;
};

Permutation identity_permutation(int n);

// Random instance generation parameters. cp is the exact fraction of
// conflicting pairs; lengths come from Normal(mean, stddev) redrawn
// until strictly positive.
struct InstanceConfig {
    int n = 0;
    int m = 1;
    double length_mean = 1000.0;
    double length_stddev = 100.0;
    double conflict_parity = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

// ratio of conflicting pairs to C(n,2); requires n >= 2
double conflict_parity(const ProblemInstance& instance);

ProblemInstance generate_instance(const InstanceConfig& config);

// JSON instance files: {"n":…,"m":…,"lengths":[…],"conflicts":[[i,j],…]}.
// The writer emits upper-triangle pairs sorted lexicographically; the
// reader accepts pairs in any order/orientation and symmetrizes.
std::string write_instance_json(const ProblemInstance& instance);
ProblemInstance read_instance_json(const std::string& text);
ProblemInstance load_instance_file(const std::string& path);
void save_instance_file(const ProblemInstance& instance, const std::string& path);

}  // namespace txnsp
