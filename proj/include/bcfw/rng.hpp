#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

// Self-contained PRNG so that every random quantity in the library is
// bit-reproducible from a single 64-bit seed, independent of the platform's
// standard-library implementation.

namespace bcfw {

// SplitMix64 (Steele, Lea, Vigna). Used for seeding and for deriving
// independent streams; one output per state increment of the golden-ratio
// constant.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stream-split convention: the k-th derived seed of `base` is the k-th
// SplitMix64 output of a generator started at `base` (k = 0, 1, ...).
// Instance i of an experiment with base seed s uses derive_seed(s, i).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t state = base;
    std::uint64_t out = 0;
    for (std::uint64_t k = 0; k <= index; ++k) out = splitmix64(state);
    return out;
}

// xoshiro256** 1.0 (Blackman, Vigna), an xorshift-family generator with
// period 2^256 - 1. State is seeded from SplitMix64 so that seed 0 is valid.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
        has_cached_normal_ = false;
        cached_normal_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n) via 128-bit multiply-shift; one draw per call.
    std::uint64_t bounded(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::bounded: n must be positive");
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller; draws two uniforms per pair and caches
    // the second variate, so consumption is two next_u64 calls per two normals.
    double next_normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        // u1 in (0, 1] so the log is finite.
        const double u1 = 1.0 - next_double();
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_normal_ = radius * std::sin(angle);
        has_cached_normal_ = true;
        return radius * std::cos(angle);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    bool has_cached_normal_;
    double cached_normal_;
};

}  // namespace bcfw
