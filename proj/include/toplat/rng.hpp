#pragma once
#include <cmath>
#include <cstdint>

// Fully specified, platform-independent random number generation.
//
// Uniform stream: xorshift64* (Vigna). State advances as
//   x ^= x >> 12; x ^= x << 25; x ^= x >> 27; return x * 2685821657736338717
// Uniform doubles take the top 53 bits, mapped to (0, 1].
// Gaussian samples: Box-Muller on consecutive uniform pairs, cached spare.
// Stream derivation: splitmix64 finalizer mixing (seed, index) words, so
// per-realization streams are decorrelated and order-independent.

namespace toplat {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Combine a base seed with stream indices (e.g. disorder level, realization).
inline std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t a,
                                        std::uint64_t b = 0) {
    std::uint64_t s = splitmix64(base ^ 0xA0761D6478BD642Full);
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ b);
    return s != 0 ? s : 0x9E3779B97F4A7C15ull;  // xorshift64* state must be nonzero
}

class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed)
        : state_(seed != 0 ? seed : 0x9E3779B97F4A7C15ull) {}

    std::uint64_t next() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1Dull;
    }

    // Uniform double in (0, 1]: top 53 bits, shifted into (0,1] so that
    // log(u) in Box-Muller is always finite.
    double uniform01() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

    // Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = gen_.uniform01();
        const double u2 = gen_.uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    Xorshift64Star gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace toplat
