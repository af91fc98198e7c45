#pragma once

/// @file rng.hpp
/// @brief Portable seeded random stream.
///
/// The standard library distributions are implementation-defined, so draws
/// are built directly on SplitMix64:
///
///     state += 0x9E3779B97F4A7C15
///     z = state
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     return z ^ (z >> 31)
///
/// uniform_index(n) rejects the top partial block so it is unbiased;
/// uniform01() takes the high 53 bits. Identical seeds give identical
/// sequences on every platform.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

namespace afevo {

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, n). Precondition: n > 0.
    std::uint64_t uniform_index(std::uint64_t n) noexcept {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - (max % n + 1) % n;
        std::uint64_t r = next_u64();
        while (r > limit) r = next_u64();
        return r % n;
    }

    /// Uniform real in [0, 1).
    double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// True with probability p; p <= 0 never, p >= 1 always. One draw either way.
    bool bernoulli(double p) noexcept { return uniform01() < p; }

    /// Standard normal via Box-Muller (one sample per two uniforms).
    double normal() noexcept {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t state() const noexcept { return state_; }

  private:
    std::uint64_t state_;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seeded 64-bit hash of a string (FNV-1a, then mixed with the seed).
constexpr std::uint64_t hash64(std::uint64_t seed, std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(h ^ mix64(seed + 0x9E3779B97F4A7C15ULL));
}

/// Fisher-Yates shuffle driven by an RngStream.
template <class RandomIt>
void shuffle(RandomIt first, RandomIt last, RngStream& rng) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const std::uint64_t j = rng.uniform_index(i);
        using std::swap;
        swap(first[i - 1], first[j]);
    }
}

} // namespace afevo
