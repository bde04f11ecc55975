#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gafzero/model.hpp"
#include "gafzero/statutil.hpp"

using namespace gafzero;
using Catch::Approx;

namespace {
const ModelSpec flat1{Family::Flat, 1.0};
const ModelSpec hyp1{Family::Hyperbolic, 1.0};
} // namespace

TEST_CASE("model validation") {
    CHECK_THROWS(ModelSpec(Family::Flat, 0.0));
    CHECK_THROWS(ModelSpec(Family::Elliptic, 2.5));
    CHECK_THROWS(ModelSpec(Family::Elliptic, 0.0));
    CHECK_NOTHROW(ModelSpec(Family::Elliptic, 3.0));
    CHECK_NOTHROW(ModelSpec(Family::Hyperbolic, 0.25));
}

TEST_CASE("coefficient weights") {
    CHECK(weight(flat1, 0) == 1.0);
    CHECK(weight(flat1, 4) == Approx(0.20412414523193151).epsilon(1e-12)); // sqrt(1/24)
    CHECK(weight(ModelSpec(Family::Elliptic, 3.0), 5) == 0.0);
    // elliptic w_k^2 = binom(L,k)
    CHECK(weight(ModelSpec(Family::Elliptic, 6.0), 2) == Approx(std::sqrt(15.0)));
    // hyperbolic w_k^2 = rising factorial / k!
    CHECK(weight(ModelSpec(Family::Hyperbolic, 2.0), 3) ==
          Approx(std::sqrt(2.0 * 3.0 * 4.0 / 6.0)));
    // w_0 = 1 for all families
    for (auto fam : {Family::Elliptic, Family::Flat, Family::Hyperbolic})
        CHECK(weight(ModelSpec(fam, 2.0), 0) == 1.0);
}

TEST_CASE("log-space weights never overflow at extreme orders") {
    ModelSpec big(Family::Flat, 1e4);
    double lw = log_weight_sq(big, 1'000'000);
    CHECK(std::isfinite(lw));
    ModelSpec bigh(Family::Hyperbolic, 1e4);
    CHECK(std::isfinite(log_weight_sq(bigh, 1'000'000)));
}

TEST_CASE("covariance closed forms") {
    cplx z(1.0, 1.0); // |z|^2 = 2
    CHECK(std::abs(covariance(flat1, z, z) - cplx(7.3890560989306502, 0)) < 1e-12);
    for (auto fam : {Family::Elliptic, Family::Flat, Family::Hyperbolic})
        CHECK(covariance(ModelSpec(fam, 2.0), 0.0, 0.0) == cplx(1.0, 0.0));
    CHECK(std::abs(covariance(hyp1, 0.5, 0.5) - cplx(4.0 / 3.0, 0)) < 1e-14);
    CHECK_THROWS(covariance(hyp1, cplx(1.1, 0), cplx(0, 0)));
}

TEST_CASE("weight-kernel consistency: truncated series matches closed form") {
    struct Case {
        ModelSpec m;
        double radius;
    };
    const Case cases[] = {{flat1, 2.0},
                          {ModelSpec(Family::Flat, 3.0), 1.5},
                          {hyp1, 0.7},
                          {ModelSpec(Family::Hyperbolic, 2.5), 0.6},
                          {ModelSpec(Family::Elliptic, 12.0), 2.0}};
    for (const auto& c : cases) {
        long N = truncation_index(c.m, c.radius, 1e-8);
        auto w = weight_table(c.m, N);
        for (int rep = 0; rep < 10; ++rep) {
            double t1 = u01(5, 0, static_cast<std::uint64_t>(rep), 3);
            double t2 = u01(5, 1, static_cast<std::uint64_t>(rep), 3);
            cplx z = std::polar(c.radius * std::sqrt(t1), 2 * M_PI * t2);
            cplx zz = std::polar(c.radius * std::sqrt(t2), 4 * M_PI * t1);
            cplx series = 0, pw = 1.0;
            for (long k = 0; k <= N; ++k) {
                series += w[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(k)] * pw;
                pw *= z * std::conj(zz);
            }
            cplx closed = covariance(c.m, z, zz);
            CHECK(std::abs(series - closed) <= 1e-6 * (1.0 + std::abs(closed)));
        }
    }
}

TEST_CASE("truncation index") {
    CHECK(truncation_index(ModelSpec(Family::Elliptic, 10.0), 100.0, 0.5) == 10);
    long N = truncation_index(flat1, 3.0, 1e-8);
    CHECK(N >= 9); // the weight profile peaks near k = L r^2 = 9
    // certified tail: sum_{k>N} w_k^2 r^{2k} <= tol^2 * K(r,r)
    double tail = 0;
    for (long k = N + 1; k <= N + 2000; ++k)
        tail += std::exp(log_weight_sq(flat1, k) + 2.0 * k * std::log(3.0));
    CHECK(tail <= 1e-16 * std::exp(9.0));
    // a smaller N must fail the certificate (minimality within slack 1)
    double tail2 = tail;
    for (long k = N - 1 + 1; k <= N; ++k)
        tail2 += std::exp(log_weight_sq(flat1, k) + 2.0 * k * std::log(3.0));
    CHECK(tail2 > 0.9e-16 * std::exp(9.0));
    CHECK_THROWS(truncation_index(hyp1, 1.0, 1e-8));
    CHECK_NOTHROW(truncation_index(hyp1, 0.99, 1e-8));
}

TEST_CASE("sampling is deterministic and independent of history") {
    auto s1 = sample(flat1, 32, 99, 5, 2.0);
    auto s2 = sample(flat1, 32, 99, 5, 2.0);
    REQUIRE(s1.coeffs.size() == 33);
    CHECK(s1.coeffs == s2.coeffs);
    auto s3 = sample(flat1, 32, 99, 6, 2.0);
    CHECK(s1.coeffs != s3.coeffs);
}

TEST_CASE("sampled coefficient moments match the standard complex Gaussian") {
    const long trials = 100000;
    cplx mean0 = 0, cross = 0;
    double e2 = 0;
    for (long t = 0; t < trials; ++t) {
        auto z0 = complex_gaussian(31337, static_cast<std::uint64_t>(t), 0);
        auto z1 = complex_gaussian(31337, static_cast<std::uint64_t>(t), 1);
        mean0 += z0;
        e2 += std::norm(z0);
        cross += z0 * std::conj(z1);
    }
    double n = trials;
    double se_mean = std::sqrt(0.5 / n); // per component
    CHECK(std::abs(mean0 / n) < 4 * se_mean * std::sqrt(2.0));
    CHECK(e2 / n == Approx(1.0).margin(0.01));
    CHECK(std::abs(cross / n) < 4 / std::sqrt(n));
}

TEST_CASE("evaluate") {
    auto s = sample(flat1, 24, 7, 0, 1.5);
    CHECK(evaluate(s, 0.0) == s.coeffs[0]);
    CHECK_THROWS(evaluate(s, cplx(2.0, 0.0))); // outside the certified radius

    // Monte Carlo: E|f(z)|^2 = K(z,z) and E|f*(z)|^2 = 1
    const long trials = 100000;
    cplx z(1.0, 1.0);
    long N = 2 * truncation_index(flat1, 1.5, 1e-8);
    double e2 = 0, e2n = 0;
    for (long t = 0; t < trials; ++t) {
        auto st = sample(flat1, N, 2718, static_cast<std::uint64_t>(t), 1.5);
        e2 += std::norm(evaluate(st, z));
        e2n += std::norm(evaluate_normalized(st, z));
    }
    CHECK(e2 / trials == Approx(7.3890560989306502).epsilon(0.02));
    CHECK(e2n / trials == Approx(1.0).epsilon(0.02));
}

TEST_CASE("isometries: examples and inverse round-trips") {
    auto id = IsometrySpec::flat(0.0, 0.0);
    CHECK(isometry_apply(id, cplx(1, 1)) == cplx(1, 1));

    auto hyp = IsometrySpec::hyperbolic(0.0, 0.5);
    CHECK(std::abs(isometry_apply(hyp, 0.5)) < 1e-15);

    auto rot = IsometrySpec::flat(M_PI / 2, 1.0);
    CHECK(std::abs(isometry_apply(rot, 1.0) - cplx(1, 1)) < 1e-15);

    const IsometrySpec cases[] = {
        IsometrySpec::flat(0.7, cplx(2, -1)),
        IsometrySpec::hyperbolic(1.1, cplx(0.3, 0.4)),
        IsometrySpec::elliptic(cplx(0.6, 0.3), cplx(-0.2, 0.7)),
    };
    for (const auto& iso : cases) {
        auto inv = isometry_inverse(iso);
        for (int rep = 0; rep < 20; ++rep) {
            double u = u01(17, 0, static_cast<std::uint64_t>(rep), 3);
            double v = u01(17, 1, static_cast<std::uint64_t>(rep), 3);
            cplx z = std::polar(0.8 * std::sqrt(u), 2 * M_PI * v);
            cplx back = isometry_apply(inv, isometry_apply(iso, z));
            CHECK(std::abs(back - z) < 1e-12);
        }
    }
}

TEST_CASE("isometries preserve the invariant measure") {
    struct Case {
        ModelSpec m;
        IsometrySpec iso;
        Disc disc;
    };
    const Case cases[] = {
        {flat1, IsometrySpec::flat(0.9, cplx(1.5, -2.0)), Disc{cplx(0.4, 0.1), 0.8}},
        {hyp1, IsometrySpec::hyperbolic(0.4, cplx(0.35, -0.15)), Disc{cplx(0.1, 0.2), 0.3}},
        {ModelSpec(Family::Elliptic, 4.0), IsometrySpec::elliptic(cplx(0.8, 0.1), cplx(0.2, 0.55)),
         Disc{cplx(0.3, -0.2), 0.6}},
    };
    for (const auto& c : cases) {
        // m*(gamma(R)) computed as the Jacobian-weighted pullback over R
        double direct = integrate_disc(
            [&](cplx z) { return invariant_density(c.m, z); }, c.disc.center, c.disc.radius, 96);
        double pullback = integrate_disc(
            [&](cplx z) {
                return invariant_density(c.m, isometry_apply(c.iso, z)) *
                       isometry_jacobian(c.iso, z);
            },
            c.disc.center, c.disc.radius, 96);
        CHECK(std::abs(direct - pullback) < 1e-6);
    }
}
