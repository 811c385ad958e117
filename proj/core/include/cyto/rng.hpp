#ifndef CYTO_RNG_HPP
#define CYTO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace cyto {

// splitmix64-based counter RNG. Output depends only on the seed sequence, so
// streams derived per item give results independent of iteration order and
// thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    double normal(double mean, double sigma) {
        // Box-Muller; one draw per call, the pair partner is discarded.
        double u1 = next_double();
        double u2 = next_double();
        if (u1 <= 0) u1 = 0x1.0p-53;
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    std::uint64_t poisson(double lambda) {
        if (lambda <= 0) return 0;
        const double l = std::exp(-lambda);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_double();
        } while (p > l);
        return k - 1;
    }

    // Samples an index from a row of non-negative weights summing to ~1.
    std::size_t sample_row(const double* weights, std::size_t n) {
        double u = next_double();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            u -= weights[i];
            if (u < 0) return i;
        }
        return n - 1;
    }

private:
    std::uint64_t state_;
};

// Mixes extra words into a seed to derive an independent per-item stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    Rng r(seed ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xc2b2ae3d27d4eb4fULL));
    return r.next_u64();
}

inline std::uint64_t hash_string(std::string_view s) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace cyto

#endif
