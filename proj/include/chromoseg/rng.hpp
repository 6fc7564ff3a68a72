#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace chromoseg {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Derive an independent stream seed from a master seed and stream indices.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(master ^ splitmix64(a)) ^ splitmix64(b ^ 0xD1B54A32D192ED03ULL));
}

// mt19937_64 with hand-rolled distributions so that sequences are
// bit-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0,1) with 53 random bits
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [lo, hi] inclusive, rejection-free modulo bias is
    // negligible for the small ranges used here but we reject anyway
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % span);
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    bool coin() { return (engine_() & 1u) != 0; }

    // Box-Muller; consumes two uniforms per call
    double normal(double mean, double sigma) {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 engine_;
};

// Stateless hash noise in [-1, 1], used for deterministic pixel jitter.
inline double hash_noise(std::uint64_t seed, int x, int y) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64((std::uint64_t(std::uint32_t(x)) << 32) | std::uint32_t(y)));
    return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

} // namespace chromoseg
