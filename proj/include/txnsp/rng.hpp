#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace txnsp {

// splitmix64 step; used to derive independent sub-stream seeds from one
// master seed so paired experiments stay paired.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive a named sub-stream seed. Tags are short literals ("lengths",
// "conflicts", "sa", "jobs"); a and b index grid points / instances.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the tag
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::uint64_t s = base ^ h;
    splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ULL;
    splitmix64(s);
    s ^= b * 0xc2b2ae3d27d4eb4fULL;
    return splitmix64(s);
}

// Standard normal via Box-Muller on raw mt19937_64 words. We avoid
// std::normal_distribution because its output is implementation-defined
// and seeded runs must reproduce byte-identical data files.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()(double mean, double stddev) {
        // u1 in (0,1], u2 in [0,1)
        double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
        double u2 = static_cast<double>(rng_() >> 11) * 0x1p-53;
        double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(6.283185307179586476925286766559 * u2);
        return mean + stddev * z;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace txnsp
