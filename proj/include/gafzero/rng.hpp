#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

// Counter-based random number generation (Philox4x32-10).
//
// Every random quantity in the library is a pure function of
// (seed, trial, index, substream), so Monte Carlo runs are reproducible
// bit-for-bit regardless of execution order or thread count.

namespace gafzero {

namespace detail {

inline void philox_mulhilo(std::uint32_t a, std::uint32_t b,
                           std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace detail

/// Philox 4x32, 10 rounds. Matches the Random123 reference outputs.
inline std::array<std::uint32_t, 4>
philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u, kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u, kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::philox_mulhilo(kMul0, ctr[0], hi0, lo0);
        detail::philox_mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

/// One 128-bit block of the stream keyed by (seed, trial); blocks are
/// addressed by (index, substream).  Substreams keep independent uses of
/// randomness inside one trial (coefficients, contour jitter, ...) from
/// colliding.
inline std::array<std::uint32_t, 4>
philox_block(std::uint64_t seed, std::uint64_t trial, std::uint64_t index,
             std::uint32_t substream) {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(index),
        static_cast<std::uint32_t>(index >> 32),
        static_cast<std::uint32_t>(trial),
        static_cast<std::uint32_t>(trial >> 32) ^ (substream * 0x9E3779B9u)};
    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                        static_cast<std::uint32_t>(seed >> 32)};
    return philox4x32(ctr, key);
}

namespace rng_substream {
// Substream ids used across the library.
constexpr std::uint32_t coefficients = 0;
constexpr std::uint32_t contour = 1;
constexpr std::uint32_t tiling = 2;
constexpr std::uint32_t aux = 3;
} // namespace rng_substream

/// Uniform double in [0, 1) from 53 random bits.
inline double u01(std::uint64_t seed, std::uint64_t trial, std::uint64_t index,
                  std::uint32_t substream) {
    auto b = philox_block(seed, trial, index, substream);
    std::uint64_t x = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Standard complex Gaussian zeta with E zeta = 0 and E |zeta|^2 = 1
/// (real and imaginary parts independent N(0, 1/2)).  One Philox block
/// yields one draw: |zeta| = sqrt(-log u1) with u1 in (0,1], and a
/// uniform phase.
inline std::complex<double>
complex_gaussian(std::uint64_t seed, std::uint64_t trial, std::uint64_t index,
                 std::uint32_t substream = rng_substream::coefficients) {
    auto b = philox_block(seed, trial, index, substream);
    std::uint64_t xa = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    std::uint64_t xb = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
    double u1 = (static_cast<double>(xa >> 11) + 1.0) * 0x1.0p-53; // (0,1]
    double u2 = static_cast<double>(xb >> 11) * 0x1.0p-53;         // [0,1)
    double r = std::sqrt(-std::log(u1));
    double ph = 2.0 * M_PI * u2;
    return {r * std::cos(ph), r * std::sin(ph)};
}

} // namespace gafzero
