#pragma once

#include <cmath>
#include <cstdint>

namespace orpheus {

// Seedable, portable random generator used by every stochastic operation in
// the toolkit. xoshiro256** seeded through splitmix64, with a fixed
// stream-splitting rule so that per-index work units (score k of a dataset,
// the pitch vs. duration pass of a mutation) draw from independent,
// reproducible streams. No libc or libstdc++ distribution is involved, so the
// sequences are identical on every platform.
class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be > 0.
    uint64_t next_below(uint64_t n) {
        const uint64_t idx = static_cast<uint64_t>(next_double() * static_cast<double>(n));
        return idx >= n ? n - 1 : idx;
    }

    // Standard normal via Box-Muller; consumes exactly two uniforms.
    double next_gaussian() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Stream-splitting rule: the RNG for work unit `index` under root `seed`.
    static uint64_t derive_seed(uint64_t seed, uint64_t index) {
        return mix64(seed + (index + 1) * 0x9E3779B97F4A7C15ull);
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9E3779B97F4A7C15ull;
        return mix64(x);
    }

    static uint64_t mix64(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    uint64_t state_[4];
};

}  // namespace orpheus
