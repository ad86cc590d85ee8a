#pragma once

#include <cmath>
#include <cstdint>

// Deterministic counter-based randomness. Every random quantity in the
// simulator is a pure function of (seed, coordinates), so devices and
// campaigns replay bit-identically regardless of evaluation order.

namespace rhlab::rng {

/// splitmix64 finalizer. Full 64-bit avalanche.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix(a, b) ^ mix64(c ^ 0x6a09e667f3bcc909ULL));
}

inline std::uint64_t cell_key(std::uint32_t row, std::uint32_t col) {
    return (static_cast<std::uint64_t>(row) << 32) | col;
}

/// Uniform double in [0, 1) from a hash value.
inline double unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1] from a hash value (safe for log()).
inline double unit_open(std::uint64_t h) {
    return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal deviate via Box-Muller on two sub-hashes of `h`.
inline double gaussian(std::uint64_t h) {
    const double u1 = unit_open(h);
    const double u2 = unit(mix64(h ^ 0x4255534d554c4cULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Domain-separation salts for the independent random streams.
inline constexpr std::uint64_t kSaltThreshold = 0x7468726573686f6cULL;
inline constexpr std::uint64_t kSaltJitter = 0x6a69747465720000ULL;

}  // namespace rhlab::rng
