#pragma once

#include <cstdint>
#include <random>

namespace bhsim {

/// SplitMix64 finalizer, used to derive independent stream seeds from a run seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Named random streams of a run. Each stream is seeded independently so that
/// e.g. mobility draws are identical across protocol variants.
enum class Stream : std::uint64_t {
    Mobility = 1,
    Medium = 2,
    Traffic = 3,
    Roles = 4,
    Behavior = 5,
};

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
    return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream));
}

/// Seeded generator with platform-independent sampling.
///
/// std::mt19937_64 output is fully specified by the standard, but the
/// std::*_distribution adaptors are not, so sampling is done by hand here.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v = gen_();
        while (v >= limit) v = gen_();
        return v % n;
    }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform01() < p;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace bhsim
