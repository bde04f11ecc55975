#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "gafzero/model.hpp"

// Closed-form and exactly computable laws, used as ground truth for the
// Monte Carlo estimators.

namespace gafzero {

/// First intensity: expected zeros per unit Euclidean area.
inline double ek_intensity(const ModelSpec& m, cplx z) {
    require_in_domain(m, z);
    double L = m.intensity_L;
    double s = std::norm(z);
    switch (m.family) {
        case Family::Flat: return L / M_PI;
        case Family::Elliptic: {
            double d = 1.0 + s;
            return L / (M_PI * d * d);
        }
        case Family::Hyperbolic: {
            double d = 1.0 - s;
            return L / (M_PI * d * d);
        }
    }
    return 0;
}

/// Expected number of zeros in a disc centered at the origin.
inline double expected_count_disc(const ModelSpec& m, double radius) {
    double L = m.intensity_L;
    double r2 = radius * radius;
    switch (m.family) {
        case Family::Flat: return L * r2;
        case Family::Elliptic: return L * r2 / (1.0 + r2);
        case Family::Hyperbolic:
            if (radius >= 1.0) throw std::domain_error("radius must be < 1");
            return L * r2 / (1.0 - r2);
    }
    return 0;
}

/// Intensity density of the curve with basis f_k(z) = w_k z^k for an
/// arbitrary truncated weight list: (1/pi) (f#)^2.  Evaluated through the
/// Lagrange identity
///   sum_{i<k} |f_i' f_k - f_i f_k'|^2 = |f'|^2 |f|^2 - |<f',f>|^2,
/// which is O(N) per point instead of the O(N^2) pair sum.
inline double fs_density(const std::vector<double>& weights, cplx z) {
    if (weights.empty()) throw std::invalid_argument("empty weight list");
    double s = std::norm(z);
    // With f_k = w_k z^k everything reduces to real series in s = |z|^2:
    //   |f|^2      = A = sum w_k^2 s^k
    //   |f'|^2     = B = sum w_k^2 k^2 s^{k-1}
    //   <f',f>     = conj(z) C,  C = sum w_k^2 k s^{k-1}
    double A = weights[0] * weights[0], B = 0.0, C = 0.0;
    double sk1 = 1.0; // s^{k-1}
    for (std::size_t k = 1; k < weights.size(); ++k) {
        double w2 = weights[k] * weights[k];
        double kk = static_cast<double>(k);
        A += w2 * sk1 * s;
        B += w2 * kk * kk * sk1;
        C += w2 * kk * sk1;
        sk1 *= s;
    }
    if (!(A > 0)) throw std::domain_error("weight curve vanishes at z");
    double num = B * A - s * C * C;
    return std::max(0.0, num) / (M_PI * A * A);
}

/// k-point correlation of the hyperbolic L=1 zero process (Peres-Virag):
/// pi^{-k} det[ (1 - z_i conj(z_j))^{-2} ].
inline double pv_correlation(const std::vector<cplx>& points) {
    const std::size_t k = points.size();
    if (k == 0) throw std::invalid_argument("need at least one point");
    for (cplx z : points)
        if (std::abs(z) >= 1.0) throw std::domain_error("points must lie in the unit disc");
    std::vector<cplx> M(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            cplx d = 1.0 - points[i] * std::conj(points[j]);
            M[i * k + j] = 1.0 / (d * d);
        }
    // LU with partial pivoting; det of a Hermitian PSD matrix, so the
    // result is real up to roundoff
    cplx det = 1.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(M[r * k + c]) > std::abs(M[piv * k + c])) piv = r;
        if (std::abs(M[piv * k + c]) == 0.0) return 0.0;
        if (piv != c) {
            for (std::size_t j = 0; j < k; ++j) std::swap(M[piv * k + j], M[c * k + j]);
            det = -det;
        }
        det *= M[c * k + c];
        for (std::size_t r = c + 1; r < k; ++r) {
            cplx f = M[r * k + c] / M[c * k + c];
            for (std::size_t j = c; j < k; ++j) M[r * k + j] -= f * M[c * k + j];
        }
    }
    double val = det.real() * std::pow(M_PI, -static_cast<double>(k));
    return std::max(0.0, val);
}

/// Normalized two-point function of the hyperbolic L=1 process as a
/// function of the pseudo-hyperbolic distance d = |(z-w)/(1 - conj(z) w)|:
///   g(d) = 1 - (1 - d^2)^2.
/// Follows from the 2x2 Peres-Virag determinant and the identity
/// (1-|z|^2)(1-|w|^2)/|1-conj(z)w|^2 = 1 - d^2.
inline double pv_pair_g(double d) {
    double t = 1.0 - d * d;
    return 1.0 - t * t;
}

/// Exact law of the number of zeros of the hyperbolic L=1 process in a
/// disc of radius rho: a sum of independent Bernoulli(rho^{2j}), j >= 1.
struct CountLaw {
    double rho = 0;
    long truncation_J = 0;
    std::vector<double> pmf;
    double mean = 0;     // rho^2/(1-rho^2)
    double variance = 0; // rho^2/(1-rho^4)
};

inline long count_law_truncation(double rho, double tol) {
    if (!(rho > 0 && rho < 1)) throw std::domain_error("rho must be in (0,1)");
    if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
    // smallest J with sum_{j>J} rho^{2j} = rho^{2(J+1)}/(1-rho^2) < tol
    double r2 = rho * rho;
    long J = static_cast<long>(
        std::ceil((std::log(tol) + std::log1p(-r2)) / std::log(r2)) - 1);
    if (J < 1) J = 1;
    while (std::pow(r2, static_cast<double>(J) + 1) / (1 - r2) >= tol) ++J;
    return J;
}

inline CountLaw count_law_hyperbolic(double rho, double tol = 1e-12) {
    CountLaw law;
    law.rho = rho;
    law.truncation_J = count_law_truncation(rho, tol);
    law.mean = rho * rho / (1.0 - rho * rho);
    law.variance = rho * rho / (1.0 - std::pow(rho, 4.0));
    // Poisson-binomial pmf by iterative convolution; exact to float precision
    law.pmf.assign(1, 1.0);
    law.pmf.reserve(static_cast<std::size_t>(law.truncation_J) + 1);
    double pj = 1.0;
    for (long j = 1; j <= law.truncation_J; ++j) {
        pj *= rho * rho; // rho^{2j}
        law.pmf.push_back(0.0);
        for (std::size_t k = law.pmf.size(); k-- > 1;)
            law.pmf[k] = law.pmf[k] * (1.0 - pj) + law.pmf[k - 1] * pj;
        law.pmf[0] *= (1.0 - pj);
    }
    return law;
}

/// P(n(rho) = 0) as the exact product prod_{j>=1} (1 - rho^{2j}).
inline double hole_prob_hyperbolic(double rho, double tol = 1e-12) {
    long J = count_law_truncation(rho, tol);
    double prod = 1.0, pj = 1.0;
    for (long j = 1; j <= J; ++j) {
        pj *= rho * rho;
        prod *= (1.0 - pj);
    }
    return prod;
}

/// Offord tail bound: P(|int phi (dn - E dn)| > lambda) <= 3 exp(-2 pi
/// lambda / |Delta phi|_1).
inline double offord_bound(double lambda, double laplacian_l1) {
    if (!(lambda > 0) || !(laplacian_l1 > 0))
        throw std::invalid_argument("offord_bound needs positive arguments");
    return 3.0 * std::exp(-2.0 * M_PI * lambda / laplacian_l1);
}

} // namespace gafzero
