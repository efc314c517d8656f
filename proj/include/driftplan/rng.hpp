#pragma once

#include <cmath>
#include <cstdint>

namespace driftplan {

// All randomness flows through this engine so that runs with equal seeds are
// reproducible across standard libraries: std::* distributions are
// implementation-defined, so uniform/normal draws are generated by hand from
// the raw 64-bit stream.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive an independent stream seed from a master seed and stream tags.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0) {
    std::uint64_t s = master;
    (void)splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ULL * (tag + 1);
    (void)splitmix64(s);
    s ^= 0xbf58476d1ce4e5b9ULL * (index + 1);
    std::uint64_t out = s;
    return splitmix64(out);
}

/// xoshiro-free minimal generator: splitmix64 state advanced per draw.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection against the biased tail of the modulo map.
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double mag = std::sqrt(-2.0 * std::log(u1));
        double two_pi_u2 = 2.0 * 3.14159265358979323846 * u2;
        spare_ = mag * std::sin(two_pi_u2);
        have_spare_ = true;
        return mag * std::cos(two_pi_u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace driftplan
