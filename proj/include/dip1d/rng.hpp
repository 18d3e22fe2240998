#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace dip1d {

/// splitmix64 finalizer (Vigna). Used for seeding and for deriving
/// sub-stream seeds; the full 64-bit avalanche makes nearby inputs
/// produce unrelated outputs.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic seed derivation: seed for sub-stream `idx` of `base`.
/// Adding streams never perturbs earlier ones.
inline uint64_t derive_seed(uint64_t base, uint64_t idx) {
    return splitmix64(splitmix64(base) ^ splitmix64(idx + 0x632BE59BD9B4E019ULL));
}

/// xoshiro256++ 1.0 (Blackman & Vigna), seeded via splitmix64.
/// Platform-independent: the stream depends only on the 64-bit seed.
/// Normal variates use the Box-Muller transform (pairs, cached).
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : s_) {
            x = splitmix64(x);
            w = x;
        }
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, hi) without modulo bias (Lemire's method).
    uint64_t next_below(uint64_t hi) {
        while (true) {
            const uint64_t x = next_u64();
            const __uint128_t m = static_cast<__uint128_t>(x) * hi;
            const uint64_t lo = static_cast<uint64_t>(m);
            if (lo >= hi || lo >= static_cast<uint64_t>(-hi) % hi) return static_cast<uint64_t>(m >> 64);
        }
    }

    /// Standard normal via Box-Muller; consumes two uniforms per pair.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so log() is finite
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace dip1d
