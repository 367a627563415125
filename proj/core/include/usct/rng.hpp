#pragma once

#include <cmath>
#include <cstdint>

namespace usct {

// SplitMix64. Small, fully specified, and identical on every platform, so
// seeded outputs are reproducible byte for byte. Distribution helpers pull
// 53-bit mantissas; gauss() is a plain Box-Muller pair.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // standard normal pair
    void gauss(double& g1, double& g2) {
        double u1 = 0.0;
        do { u1 = next_double(); } while (u1 <= 0.0);
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        g1 = r * std::cos(two_pi * u2);
        g2 = r * std::sin(two_pi * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace usct
