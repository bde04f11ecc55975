#include <catch2/catch_amalgamated.hpp>

#include "gafzero/rng.hpp"

using namespace gafzero;

TEST_CASE("philox4x32-10 matches the reference known-answer vectors") {
    // Random123 kat_vectors, philox4x32 with 10 rounds
    auto r0 = philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(r0 == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu,
                                             0x9b00dbd8u});
    auto r1 = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu});
    CHECK(r1 == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u,
                                             0x6d5451fdu});
    auto r2 = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                         {0xa4093822u, 0x299f31d0u});
    CHECK(r2 == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u,
                                             0x24126ea1u});
}

TEST_CASE("streams are pure functions of (seed, trial, index, substream)") {
    for (int rep = 0; rep < 3; ++rep) {
        CHECK(complex_gaussian(42, 7, 11) == complex_gaussian(42, 7, 11));
        CHECK(u01(42, 7, 11, 2) == u01(42, 7, 11, 2));
    }
    CHECK(complex_gaussian(42, 7, 11) != complex_gaussian(42, 7, 12));
    CHECK(complex_gaussian(42, 7, 11) != complex_gaussian(42, 8, 11));
    CHECK(complex_gaussian(42, 7, 11) != complex_gaussian(43, 7, 11));
    CHECK(u01(1, 2, 3, 0) != u01(1, 2, 3, 1));
}

TEST_CASE("u01 lies in [0,1)") {
    for (std::uint64_t i = 0; i < 10000; ++i) {
        double u = u01(9, 0, i, 3);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("complex gaussian has the E|zeta|^2 = 1 convention") {
    const long n = 200000;
    double sum_sq = 0;
    std::complex<double> mean = 0, cross = 0;
    std::complex<double> prev = 0;
    for (long i = 0; i < n; ++i) {
        auto z = complex_gaussian(2024, 0, static_cast<std::uint64_t>(i));
        sum_sq += std::norm(z);
        mean += z;
        if (i > 0) cross += z * std::conj(prev);
        prev = z;
    }
    mean /= static_cast<double>(n);
    cross /= static_cast<double>(n - 1);
    // E|zeta|^2 = 1 within 4 standard errors (SE of |z|^2 mean is 1/sqrt n)
    CHECK(std::abs(sum_sq / n - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));
    // mean and lag-1 cross-moment vanish; each component has sd 1/sqrt(2n)
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(cross) < 4.0 / std::sqrt(static_cast<double>(n)));
}
