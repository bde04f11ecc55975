#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "gafzero/testfunc.hpp"

using namespace gafzero;
using Catch::Approx;
using cplx = std::complex<double>;

TEST_CASE("test function construction") {
    CHECK_THROWS(TestFunction(2));
    CHECK_NOTHROW(TestFunction(3));
}

TEST_CASE("closed-form norms agree with adaptive quadrature") {
    for (int p : {3, 4, 5}) {
        TestFunction h(p);
        CHECK(h.integral() == Approx(h.integral_quad()).epsilon(1e-10));
        CHECK(h.laplacian_l1() == Approx(h.laplacian_l1_quad()).epsilon(1e-10));
        CHECK(h.laplacian_l2_sq() == Approx(h.laplacian_l2_sq_quad()).epsilon(1e-10));
        CHECK(h.gradient_l2_sq() == Approx(h.gradient_l2_sq_quad()).epsilon(1e-10));
        // divergence theorem: the Laplacian integrates to zero
        CHECK(std::abs(h.laplacian_integral_quad()) < 1e-9);
    }
    // frozen values for p = 3: 32 pi/9, 19.2 pi, 6 pi/5
    TestFunction h3(3);
    CHECK(h3.integral() == Approx(M_PI / 4).epsilon(1e-14));
    CHECK(h3.laplacian_l1() == Approx(32.0 * M_PI / 9.0).epsilon(1e-14));
    CHECK(h3.laplacian_l2_sq() == Approx(19.2 * M_PI).epsilon(1e-14));
    CHECK(h3.gradient_l2_sq() == Approx(1.2 * M_PI).epsilon(1e-14));
}

TEST_CASE("laplacian closed form matches finite differences") {
    TestFunction h(4);
    const double eps = 1e-5;
    for (cplx z : {cplx(0.2, 0.1), cplx(-0.5, 0.3), cplx(0.0, 0.6), cplx(0.45, -0.45)}) {
        double fd = (h(z + eps) + h(z - eps) + h(z + cplx(0, eps)) + h(z - cplx(0, eps)) -
                     4.0 * h(z)) /
                    (eps * eps);
        CHECK(h.laplacian(z) == Approx(fd).margin(1e-4));
    }
}

TEST_CASE("support and continuity at the boundary") {
    TestFunction h(3);
    CHECK(h(cplx(1.2, 0.0)) == 0.0);
    CHECK(h(cplx(0.9999, 0.0)) > 0.0);
    CHECK(h.laplacian(cplx(1.0 - 1e-9, 0.0)) == Approx(0.0).margin(1e-7));
    CHECK(h.laplacian(cplx(2.0, 0.0)) == 0.0);
}
