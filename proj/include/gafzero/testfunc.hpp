#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "gafzero/statutil.hpp"

namespace gafzero {

/// Radial C^2 test function with compact support:
///   h(z) = (1 - |z|^2)^p for |z| <= 1, 0 otherwise,  integer p >= 3,
/// with closed-form Laplacian and norms.  With s = |z|^2:
///   Delta h = 4 p (1-s)^{p-2} (p s - 1)
///   int h dm       = pi / (p+1)
///   |Delta h|_1    = 8 pi (1 - 1/p)^{p-1}
///   |Delta h|_2^2  = 16 p^2 pi (p^2 I2 - 2 p I1 + I0),  In = Beta(n+1, 2p-3)
///   |grad h|_2^2   = 2 pi p / (2p - 1)
/// All four are unit-tested against adaptive quadrature of the radial
/// profile.
struct TestFunction {
    int p;

    explicit TestFunction(int p_) : p(p_) {
        if (p < 3) throw std::invalid_argument("test function needs p >= 3 for C^2");
    }

    double operator()(std::complex<double> z) const {
        double s = std::norm(z);
        return s <= 1.0 ? std::pow(1.0 - s, p) : 0.0;
    }

    double laplacian(std::complex<double> z) const {
        double s = std::norm(z);
        if (s > 1.0) return 0.0;
        return 4.0 * p * std::pow(1.0 - s, p - 2) * (p * s - 1.0);
    }

    double integral() const { return M_PI / (p + 1.0); }

    double laplacian_l1() const {
        return 8.0 * M_PI * std::pow(1.0 - 1.0 / p, p - 1.0);
    }

    double laplacian_l2_sq() const {
        double pp = p;
        double I0 = 1.0 / (2 * pp - 3);
        double I1 = 1.0 / ((2 * pp - 3) * (2 * pp - 2));
        double I2 = 2.0 / ((2 * pp - 3) * (2 * pp - 2) * (2 * pp - 1));
        return 16.0 * pp * pp * M_PI * (pp * pp * I2 - 2.0 * pp * I1 + I0);
    }

    double gradient_l2_sq() const { return 2.0 * M_PI * p / (2.0 * p - 1.0); }

    // Quadrature versions (radial substitution s = r^2, dm = pi ds), used
    // by the consistency tests.
    double integral_quad() const {
        return M_PI * integrate([&](double s) { return std::pow(1.0 - s, p); }, 0, 1);
    }
    double laplacian_l1_quad() const {
        auto f = [&](double s) {
            return std::abs(4.0 * p * std::pow(1.0 - s, p - 2) * (p * s - 1.0));
        };
        // split at the sign change s = 1/p
        return M_PI * (integrate(f, 0, 1.0 / p) + integrate(f, 1.0 / p, 1));
    }
    double laplacian_l2_sq_quad() const {
        auto f = [&](double s) {
            double v = 4.0 * p * std::pow(1.0 - s, p - 2) * (p * s - 1.0);
            return v * v;
        };
        return M_PI * integrate(f, 0, 1);
    }
    double gradient_l2_sq_quad() const {
        auto f = [&](double s) {
            return 4.0 * s * p * p * std::pow(1.0 - s, 2 * p - 2);
        };
        return M_PI * integrate(f, 0, 1);
    }
    double laplacian_integral_quad() const {
        auto f = [&](double s) {
            return 4.0 * p * std::pow(1.0 - s, p - 2) * (p * s - 1.0);
        };
        return M_PI * integrate(f, 0, 1);
    }
};

} // namespace gafzero
