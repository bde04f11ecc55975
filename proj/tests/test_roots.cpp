#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "gafzero/roots.hpp"

using namespace gafzero;
using Catch::Approx;

namespace {
const ModelSpec flat1{Family::Flat, 1.0};

/// Sample whose weighted-basis polynomial equals the given coefficients.
GafSample synthetic(const ModelSpec& m, std::vector<cplx> poly, double cert) {
    auto w = weight_table(m, static_cast<long>(poly.size()) - 1);
    for (std::size_t k = 0; k < poly.size(); ++k) {
        if (w[k] == 0.0 && poly[k] != cplx(0.0))
            throw std::runtime_error("weight vanishes");
        poly[k] = w[k] > 0 ? poly[k] / w[k] : 0.0;
    }
    return sample_from_coeffs(m, std::move(poly), cert);
}
} // namespace

TEST_CASE("winding_count on synthetic inputs") {
    auto constant = synthetic(flat1, {cplx(2.0, 1.0), 0.0, 0.0}, 10.0);
    auto w0 = winding_count(constant, Disc{0.0, 1.0});
    REQUIRE(w0.ok);
    CHECK(w0.count == 0);

    auto zsq = synthetic(flat1, {0.0, 0.0, cplx(1.0, 0.0)}, 10.0);
    auto w2 = winding_count(zsq, Disc{0.0, 1.0});
    REQUIRE(w2.ok);
    CHECK(w2.count == 2); // double zero at the origin

    // near-vanishing function: the boundary floor rejects certification
    auto tiny = synthetic(flat1, {cplx(1e-9, 0.0), 0.0}, 10.0);
    auto wt = winding_count(tiny, Disc{0.0, 1.0});
    CHECK_FALSE(wt.ok);
}

TEST_CASE("winding_count Monte Carlo mean matches the flat intensity") {
    // E n(r) = r^2 for flat L=1
    const long trials = 2000;
    const double r = 3.0;
    long N = 2 * truncation_index(flat1, 3.2, 1e-8);
    double sum = 0;
    long used = 0;
    for (long t = 0; t < trials; ++t) {
        auto s = sample(flat1, N, 913, static_cast<std::uint64_t>(t), 3.2);
        auto w = winding_count(s, Disc{0.0, r});
        if (!w.ok || w.dilated) continue;
        sum += static_cast<double>(w.count);
        ++used;
    }
    CHECK(used > trials * 99 / 100);
    double mean = sum / static_cast<double>(used);
    // count sd ~ 1.06 at r=3, so 4 standard errors is ~0.095
    CHECK(mean == Approx(9.0).margin(4.0 * 1.06 / std::sqrt(static_cast<double>(used))));
}

TEST_CASE("find_zeros on z^3 - 1") {
    auto s = synthetic(flat1, {cplx(-1.0, 0.0), 0.0, 0.0, cplx(1.0, 0.0)}, 10.0);
    auto zs = find_zeros(s, Disc{0.0, 2.0});
    REQUIRE(zs.certificate_ok);
    REQUIRE(zs.zeros.size() == 3);
    CHECK(zs.certified_count == zs.winding_total);
    std::vector<cplx> expect = {std::polar(1.0, 2 * M_PI / 3), std::polar(1.0, -2 * M_PI / 3),
                                cplx(1.0, 0.0)};
    std::sort(expect.begin(), expect.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(zs.zeros[i] - expect[i]) < 1e-10);
        CHECK(zs.residuals[i] < 1e-10);
    }
}

TEST_CASE("zeros are invariant under coefficient scaling") {
    long N = 2 * truncation_index(flat1, required_radius(flat1, Disc{0.0, 1.5}), 1e-8);
    auto base = sample(flat1, N, 551, 3, required_radius(flat1, Disc{0.0, 1.5}));
    auto scaled_coeffs = base.coeffs;
    for (auto& c : scaled_coeffs) c *= cplx(3.7e4, -1.2e4);
    auto scaled = sample_from_coeffs(flat1, scaled_coeffs, base.certified_radius);
    auto z1 = find_zeros(base, Disc{0.0, 1.5});
    auto z2 = find_zeros(scaled, Disc{0.0, 1.5});
    REQUIRE(z1.certificate_ok);
    REQUIRE(z2.certificate_ok);
    REQUIRE(z1.zeros.size() == z2.zeros.size());
    for (std::size_t i = 0; i < z1.zeros.size(); ++i)
        CHECK(std::abs(z1.zeros[i] - z2.zeros[i]) < 1e-12);
}

TEST_CASE("subdivision conserves winding counts") {
    ZeroFindOptions opt;
    opt.record_subdivision = true;
    double R = required_radius(flat1, Disc{0.0, 2.5});
    long N = 2 * truncation_index(flat1, R, 1e-8);
    long splits_seen = 0;
    for (long t = 0; t < 40; ++t) {
        auto s = sample(flat1, N, 8712, static_cast<std::uint64_t>(t), R);
        auto zs = find_zeros(s, Disc{0.0, 2.5}, opt);
        if (!zs.certificate_ok) continue;
        for (const auto& rec : zs.subdivision_log) {
            long sum = 0;
            for (long c : rec.child_counts)
                if (c >= 0) sum += c; // unused slots hold -1
            CHECK(sum == rec.parent_count);
            ++splits_seen;
        }
    }
    CHECK(splits_seen > 0);
}

TEST_CASE("flat Monte Carlo extraction: certification and intensity at r=2") {
    const long trials = 300;
    double R = required_radius(flat1, Disc{0.0, 2.0});
    long N = 2 * truncation_index(flat1, R, 1e-8);
    long certified = 0, discarded = 0;
    double sum = 0, max_resid = 0;
    for (long t = 0; t < trials; ++t) {
        auto s = sample(flat1, N, 4242, static_cast<std::uint64_t>(t), R);
        auto zs = find_zeros(s, Disc{0.0, 2.0});
        if (zs.dilated || !zs.certificate_ok) {
            ++discarded;
            continue;
        }
        ++certified;
        sum += static_cast<double>(zs.certified_count);
        for (double r : zs.residuals) max_resid = std::max(max_resid, r);
        CHECK(zs.certified_count == zs.winding_total);
        for (cplx z : zs.zeros) CHECK(contains(zs.region, z));
    }
    INFO("discarded " << discarded << " of " << trials);
    CHECK(certified >= trials - 3);
    CHECK(max_resid < 1e-9);
    double mean = sum / static_cast<double>(certified);
    // sd ~ 0.87 at r=2 -> 4 SE ~ 0.20 at 300 trials
    CHECK(mean == Approx(4.0).margin(4.0 * 0.88 / std::sqrt(static_cast<double>(certified))));
}

TEST_CASE("zero set transforms contravariantly under flat isometries") {
    auto iso = IsometrySpec::flat(0.5, cplx(0.3, -0.2));
    auto inv = isometry_inverse(iso);
    Disc disc{cplx(0.4, 0.1), 1.2};
    Disc pre{isometry_apply(inv, disc.center), disc.radius};

    double R = std::max(required_radius(flat1, disc), required_radius(flat1, pre));
    long N = 2 * truncation_index(flat1, R + 1.0, 1e-8);
    auto s = sample(flat1, N, 77, 5, R + 1.0);
    auto composed = compose_with_flat_isometry(s, iso, R + 1.0);

    auto direct = find_zeros(s, disc);
    auto pulled = find_zeros(composed, pre);
    REQUIRE(direct.certificate_ok);
    REQUIRE(pulled.certificate_ok);
    REQUIRE_FALSE(direct.dilated);
    REQUIRE_FALSE(pulled.dilated);
    REQUIRE(direct.zeros.size() == pulled.zeros.size());

    std::vector<cplx> expect;
    for (cplx z : direct.zeros) expect.push_back(isometry_apply(inv, z));
    std::sort(expect.begin(), expect.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(std::abs(expect[i] - pulled.zeros[i]) < 1e-9);
}

TEST_CASE("elliptic_roots: injected double root") {
    ModelSpec ell2(Family::Elliptic, 2.0);
    // f(z) = 1 + 2z + z^2 = (1+z)^2
    auto s = synthetic(ell2, {cplx(1.0, 0.0), cplx(2.0, 0.0), cplx(1.0, 0.0)}, 0.0);
    auto zs = elliptic_roots(s);
    REQUIRE(zs.zeros.size() == 2);
    CHECK(std::abs(zs.zeros[0] - cplx(-1.0, 0.0)) < 1e-6);
    CHECK(std::abs(zs.zeros[1] - cplx(-1.0, 0.0)) < 1e-6);
    // certificate semantics: ok implies residuals within tolerance and
    // separation above the merge tolerance
    if (zs.certificate_ok) {
        CHECK(std::abs(zs.zeros[0] - zs.zeros[1]) > 1e-8);
        for (double r : zs.residuals) CHECK(r <= 1e-9);
    }
}

TEST_CASE("elliptic_roots: random degree-20 samples resolve all roots") {
    ModelSpec ell(Family::Elliptic, 20.0);
    for (long t = 0; t < 25; ++t) {
        auto s = sample(ell, 20, 1009, static_cast<std::uint64_t>(t));
        auto zs = elliptic_roots(s);
        REQUIRE(zs.certificate_ok);
        CHECK(zs.zeros.size() == 20);
        for (double r : zs.residuals) CHECK(r < 1e-9);
    }
}

TEST_CASE("elliptic intensity: mean root count in the unit disc is L/2") {
    ModelSpec ell(Family::Elliptic, 100.0);
    const long trials = 1000;
    double sum = 0;
    long used = 0;
    for (long t = 0; t < trials; ++t) {
        auto s = sample(ell, 100, 60601, static_cast<std::uint64_t>(t));
        auto zs = elliptic_roots(s);
        if (!zs.certificate_ok) continue;
        ++used;
        for (cplx z : zs.zeros)
            if (std::abs(z) <= 1.0) sum += 1.0;
    }
    CHECK(used >= trials * 99 / 100);
    double mean = sum / static_cast<double>(used);
    // count sd is below the binomial bound 5; stay within ~3 SE
    CHECK(mean == Approx(50.0).margin(3.0 * 5.0 / std::sqrt(static_cast<double>(used))));
}

TEST_CASE("find_zeros handles empty regions") {
    auto constant = synthetic(flat1, {cplx(1.0, 0.5), 0.0}, 10.0);
    auto zs = find_zeros(constant, Disc{cplx(1.0, 1.0), 0.7});
    CHECK(zs.certificate_ok);
    CHECK(zs.certified_count == 0);
    CHECK(zs.zeros.empty());
}
