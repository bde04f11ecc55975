#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gafzero/region.hpp"
#include "gafzero/rng.hpp"

// The three canonical Gaussian analytic function ensembles, their
// coefficient weights, covariance kernels, isometries, and
// truncation-controlled sampling.
//
//   elliptic:   f(z) = sum_{k=0}^{L} zeta_k sqrt(binom(L,k)) z^k        (sphere)
//   flat:       f(z) = sum_{k>=0}  zeta_k sqrt(L^k / k!) z^k            (plane)
//   hyperbolic: f(z) = sum_{k>=0}  zeta_k sqrt(L(L+1)..(L+k-1)/k!) z^k  (unit disc)
//
// with independent zeta_k standard complex Gaussian, E|zeta_k|^2 = 1.

namespace gafzero {

enum class Family { Elliptic, Flat, Hyperbolic };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Elliptic: return "elliptic";
        case Family::Flat: return "flat";
        case Family::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

inline Family family_from_name(const std::string& s) {
    if (s == "elliptic") return Family::Elliptic;
    if (s == "flat") return Family::Flat;
    if (s == "hyperbolic") return Family::Hyperbolic;
    throw std::invalid_argument("unknown family: " + s);
}

struct ModelSpec {
    Family family = Family::Flat;
    double intensity_L = 1.0;
    std::string label;

    ModelSpec() = default;
    ModelSpec(Family f, double L, std::string lbl = {})
        : family(f), intensity_L(L), label(std::move(lbl)) {
        validate();
    }

    void validate() const {
        if (!(intensity_L > 0))
            throw std::invalid_argument("intensity_L must be positive");
        if (family == Family::Elliptic &&
            (intensity_L != std::floor(intensity_L) || intensity_L < 1))
            throw std::invalid_argument("elliptic intensity_L must be a positive integer");
    }

    long elliptic_degree() const {
        return family == Family::Elliptic ? static_cast<long>(intensity_L) : -1;
    }
};

/// True iff z lies in the open domain of the model (plane, unit disc, or
/// the planar chart of the sphere, which is all of C).
inline bool in_domain(const ModelSpec& m, cplx z) {
    if (m.family == Family::Hyperbolic) return std::abs(z) < 1.0;
    (void)z;
    return true;
}

inline void require_in_domain(const ModelSpec& m, cplx z) {
    if (!in_domain(m, z))
        throw std::domain_error("point outside model domain");
}

// ---------------------------------------------------------------------------
// Coefficient weights
// ---------------------------------------------------------------------------

/// log of the squared weight ratio w_{k+1}^2 / w_k^2.
inline double log_weight_sq_ratio(const ModelSpec& m, long k) {
    double L = m.intensity_L;
    switch (m.family) {
        case Family::Flat: return std::log(L) - std::log1p(static_cast<double>(k));
        case Family::Hyperbolic:
            return std::log(L + static_cast<double>(k)) - std::log1p(static_cast<double>(k));
        case Family::Elliptic:
            if (static_cast<double>(k) >= L) return -std::numeric_limits<double>::infinity();
            return std::log(L - static_cast<double>(k)) - std::log1p(static_cast<double>(k));
    }
    return 0;
}

/// log w_k^2, accumulated in log space; never overflows (w_0 = 1 for all
/// three families).  Returns -inf for elliptic k > L.
inline double log_weight_sq(const ModelSpec& m, long k) {
    if (k < 0) throw std::invalid_argument("weight index must be >= 0");
    double acc = 0.0;
    for (long j = 0; j < k; ++j) {
        double r = log_weight_sq_ratio(m, j);
        if (r == -std::numeric_limits<double>::infinity()) return r;
        acc += r;
    }
    return acc;
}

/// w_k itself.  May overflow to +inf for extreme (L, k); use
/// log_weight_sq where that matters.
inline double weight(const ModelSpec& m, long k) {
    double lw = log_weight_sq(m, k);
    if (lw == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(0.5 * lw);
}

/// Weights w_0..w_N in one pass.
inline std::vector<double> weight_table(const ModelSpec& m, long N) {
    std::vector<double> w(static_cast<std::size_t>(N) + 1);
    double acc = 0.0;
    w[0] = 1.0;
    for (long k = 0; k < N; ++k) {
        double r = log_weight_sq_ratio(m, k);
        if (r == -std::numeric_limits<double>::infinity()) {
            for (long j = k + 1; j <= N; ++j) w[static_cast<std::size_t>(j)] = 0.0;
            return w;
        }
        acc += r;
        w[static_cast<std::size_t>(k) + 1] = std::exp(0.5 * acc);
    }
    return w;
}

// ---------------------------------------------------------------------------
// Covariance
// ---------------------------------------------------------------------------

/// K(z,w) = sum_k w_k^2 z^k conj(w)^k in closed form.
inline cplx covariance(const ModelSpec& m, cplx z, cplx w) {
    require_in_domain(m, z);
    require_in_domain(m, w);
    cplx t = z * std::conj(w);
    double L = m.intensity_L;
    switch (m.family) {
        case Family::Flat: return std::exp(L * t);
        case Family::Elliptic: return std::pow(1.0 + t, L);
        case Family::Hyperbolic: return std::pow(1.0 - t, -L);
    }
    return {};
}

/// log K(z,z); real, overflow-free form of the diagonal.
inline double log_covariance_diag(const ModelSpec& m, cplx z) {
    double s = std::norm(z);
    double L = m.intensity_L;
    switch (m.family) {
        case Family::Flat: return L * s;
        case Family::Elliptic: return L * std::log1p(s);
        case Family::Hyperbolic:
            if (s >= 1.0) throw std::domain_error("point outside model domain");
            return -L * std::log1p(-s);
    }
    return 0;
}

/// sqrt(K(z,z)), the natural normalization scale for |f(z)|.
inline double norm_scale(const ModelSpec& m, cplx z) {
    return std::exp(0.5 * log_covariance_diag(m, z));
}

// ---------------------------------------------------------------------------
// Truncation
// ---------------------------------------------------------------------------

/// Smallest N with tail variance ratio
///   sum_{k>N} w_k^2 r^{2k} / sum_{k>=0} w_k^2 r^{2k}  <=  tol^2.
/// Works on log-scaled terms so no intermediate value can overflow, and the
/// tail is bounded by a geometric majorant rather than by a cancellation-prone
/// (1 - partial sum) difference.  Elliptic is exact at N = L.
inline long truncation_index(const ModelSpec& m, double radius, double tol) {
    if (m.family == Family::Elliptic) return static_cast<long>(m.intensity_L);
    if (!(tol > 0 && tol < 1)) throw std::invalid_argument("tol must be in (0,1)");
    if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
    if (m.family == Family::Hyperbolic && radius >= 1.0)
        throw std::domain_error("hyperbolic truncation requires radius < 1");

    const double log_r2 = 2.0 * std::log(radius);
    const double log_total = log_covariance_diag(m, cplx(radius, 0));
    const double log_tol2 = 2.0 * std::log(tol);

    double log_term = -log_total; // scaled term k = 0
    for (long k = 0; k < 100'000'000; ++k) {
        // ratio of scaled term k+1 to term k
        double log_ratio = log_weight_sq_ratio(m, k) + log_r2;
        double log_next = log_term + log_ratio;
        // geometric tail bound valid once the ratio stays below q < 1
        double q = std::exp(log_ratio);
        if (m.family == Family::Hyperbolic) {
            // ratio decreases to r^2 < 1 monotonically
            if (q < 1.0 && log_next - std::log1p(-q) <= log_tol2) return k;
        } else {
            // flat: ratio L r^2/(k+1) decreases; require q <= 1/2 so the
            // geometric bound is honest
            if (q <= 0.5 && log_next - std::log1p(-q) <= log_tol2) return k;
        }
        log_term = log_next;
    }
    throw std::runtime_error("truncation_index did not converge");
}

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

struct GafSample {
    ModelSpec model;
    long truncation_N = 0;
    std::vector<cplx> coeffs; // zeta_0 .. zeta_N
    std::uint64_t seed = 0;
    std::uint64_t trial_index = 0;
    /// Radius within which the truncation was certified by the caller
    /// (infinity for elliptic: the expansion is exact).
    double certified_radius = 0.0;

    /// Polynomial coefficients in the scaled variable y = z / var_scale:
    /// f(z) = sum_k poly[k] y^k.  The scaling keeps every coefficient and
    /// every Horner intermediate representable; the raw weighted
    /// coefficients zeta_k w_k underflow to zero at large k (flat weights
    /// pass below DBL_MIN near k ~ 300), which would silently truncate the
    /// series below its certified order.
    std::vector<cplx> poly;
    double var_scale = 1.0;
};

namespace detail {
inline void build_scaled_poly(GafSample& s) {
    const long N = s.truncation_N;
    s.var_scale = std::max(1.0, s.certified_radius);
    if (!std::isfinite(s.var_scale)) s.var_scale = 1.0; // elliptic: exact polynomial
    const double log_sigma = std::log(s.var_scale);
    s.poly.resize(s.coeffs.size());
    double acc = 0.0; // log w_k^2
    for (long k = 0; k <= N; ++k) {
        double mag = std::exp(0.5 * acc + static_cast<double>(k) * log_sigma);
        if (!std::isfinite(mag))
            throw std::overflow_error("coefficient scale overflow; reduce radius or L");
        s.poly[static_cast<std::size_t>(k)] = s.coeffs[static_cast<std::size_t>(k)] * mag;
        double r = log_weight_sq_ratio(s.model, k);
        if (r == -std::numeric_limits<double>::infinity()) {
            for (long j = k + 1; j <= N; ++j) s.poly[static_cast<std::size_t>(j)] = 0.0;
            break;
        }
        acc += r;
    }
}
} // namespace detail

/// Draw a sample from the deterministic stream keyed by (seed, trial).
/// Identical inputs give bit-identical samples on every thread layout.
inline GafSample sample(const ModelSpec& m, long truncation_N, std::uint64_t seed,
                        std::uint64_t trial, double certified_radius = 0.0) {
    if (m.family == Family::Elliptic) {
        truncation_N = static_cast<long>(m.intensity_L);
        certified_radius = std::numeric_limits<double>::infinity();
    }
    GafSample s;
    s.model = m;
    s.truncation_N = truncation_N;
    s.seed = seed;
    s.trial_index = trial;
    s.certified_radius = certified_radius;
    s.coeffs.resize(static_cast<std::size_t>(truncation_N) + 1);
    for (long k = 0; k <= truncation_N; ++k)
        s.coeffs[static_cast<std::size_t>(k)] =
            complex_gaussian(seed, trial, static_cast<std::uint64_t>(k));
    detail::build_scaled_poly(s);
    return s;
}

/// Wrap externally supplied coefficients (tests inject synthetic functions
/// this way; rigidity experiments inject rotated Gaussian vectors).
inline GafSample sample_from_coeffs(const ModelSpec& m, std::vector<cplx> zeta,
                                    double certified_radius) {
    GafSample s;
    s.model = m;
    s.truncation_N = static_cast<long>(zeta.size()) - 1;
    s.coeffs = std::move(zeta);
    s.certified_radius = m.family == Family::Elliptic
                             ? std::numeric_limits<double>::infinity()
                             : certified_radius;
    detail::build_scaled_poly(s);
    return s;
}

inline void require_certified(const GafSample& s, cplx z) {
    if (!in_domain(s.model, z))
        throw std::domain_error("evaluation point outside model domain");
    if (std::abs(z) > s.certified_radius * (1.0 + 1e-12))
        throw std::domain_error("evaluation point outside certified radius");
}

/// f(z) by Horner in the scaled variable.
inline cplx evaluate(const GafSample& s, cplx z) {
    require_certified(s, z);
    cplx y = z / s.var_scale;
    cplx acc = 0.0;
    for (std::size_t k = s.poly.size(); k-- > 0;) acc = acc * y + s.poly[k];
    return acc;
}

/// f(z) and f'(z) in one pass (f' is the exact derivative of the
/// truncation, never a finite difference).
inline void evaluate_with_derivative(const GafSample& s, cplx z, cplx& f, cplx& df) {
    require_certified(s, z);
    cplx y = z / s.var_scale;
    f = 0.0;
    df = 0.0;
    for (std::size_t k = s.poly.size(); k-- > 0;) {
        df = df * y + f;
        f = f * y + s.poly[k];
    }
    df /= s.var_scale;
}

/// f(z)/sqrt(K(z,z)); unit variance at every point.
inline cplx evaluate_normalized(const GafSample& s, cplx z) {
    return evaluate(s, z) / norm_scale(s.model, z);
}

// ---------------------------------------------------------------------------
// Isometries
// ---------------------------------------------------------------------------

/// A symmetry of the model domain preserving the invariant measure:
///   flat        z -> e^{i theta} z + a
///   hyperbolic  z -> e^{i theta} (z - alpha)/(1 - conj(alpha) z), |alpha| < 1
///   elliptic    z -> (a z + b)/(-conj(b) z + conj(a)),  |a|^2 + |b|^2 = 1
struct IsometrySpec {
    Family family = Family::Flat;
    cplx p1{1.0, 0.0};
    cplx p2{0.0, 0.0};

    static IsometrySpec flat(double theta, cplx a) {
        return {Family::Flat, std::polar(1.0, theta), a};
    }
    static IsometrySpec hyperbolic(double theta, cplx alpha) {
        if (std::abs(alpha) >= 1.0)
            throw std::invalid_argument("hyperbolic isometry needs |alpha| < 1");
        return {Family::Hyperbolic, std::polar(1.0, theta), alpha};
    }
    static IsometrySpec elliptic(cplx a, cplx b) {
        double n = std::sqrt(std::norm(a) + std::norm(b));
        if (!(n > 0)) throw std::invalid_argument("elliptic isometry needs (a,b) != 0");
        return {Family::Elliptic, a / n, b / n};
    }
};

inline cplx isometry_apply(const IsometrySpec& iso, cplx z) {
    switch (iso.family) {
        case Family::Flat: return iso.p1 * z + iso.p2;
        case Family::Hyperbolic:
            return iso.p1 * (z - iso.p2) / (1.0 - std::conj(iso.p2) * z);
        case Family::Elliptic:
            return (iso.p1 * z + iso.p2) / (-std::conj(iso.p2) * z + std::conj(iso.p1));
    }
    return z;
}

inline IsometrySpec isometry_inverse(const IsometrySpec& iso) {
    switch (iso.family) {
        case Family::Flat: {
            IsometrySpec r = iso;
            r.p1 = 1.0 / iso.p1;
            r.p2 = -iso.p2 / iso.p1;
            return r;
        }
        case Family::Hyperbolic: {
            // inverse of e^{it}(z-alpha)/(1-conj(alpha)z) is the same form
            // with rotation e^{-it} and center -e^{it} alpha
            IsometrySpec r = iso;
            r.p1 = 1.0 / iso.p1;
            r.p2 = -iso.p1 * iso.p2;
            return r;
        }
        case Family::Elliptic: {
            // unitary matrix [[a,b],[-conj b, conj a]]; inverse is adjoint
            IsometrySpec r = iso;
            r.p1 = std::conj(iso.p1);
            r.p2 = -iso.p2;
            return r;
        }
    }
    return iso;
}

/// |gamma'(z)|^2, the Jacobian of the planar map.
inline double isometry_jacobian(const IsometrySpec& iso, cplx z) {
    switch (iso.family) {
        case Family::Flat: return std::norm(iso.p1);
        case Family::Hyperbolic: {
            double a2 = std::norm(iso.p2);
            cplx den = 1.0 - std::conj(iso.p2) * z;
            double d2 = std::norm(den);
            return (1.0 - a2) * (1.0 - a2) / (d2 * d2);
        }
        case Family::Elliptic: {
            cplx den = -std::conj(iso.p2) * z + std::conj(iso.p1);
            double d2 = std::norm(den);
            return 1.0 / (d2 * d2); // det = |a|^2+|b|^2 = 1
        }
    }
    return 1.0;
}

/// Density of the invariant measure m* wrt Lebesgue measure, normalized so
/// that E n = L m* (flat: 1/pi; elliptic: total mass 1).
inline double invariant_density(const ModelSpec& m, cplx z) {
    double s = std::norm(z);
    switch (m.family) {
        case Family::Flat: return 1.0 / M_PI;
        case Family::Elliptic: {
            double d = 1.0 + s;
            return 1.0 / (M_PI * d * d);
        }
        case Family::Hyperbolic: {
            require_in_domain(m, z);
            double d = 1.0 - s;
            return 1.0 / (M_PI * d * d);
        }
    }
    return 0;
}

/// Image of a disc under an isometry (isometries are Moebius maps, so the
/// image of a circle is a circle).  Flat maps are rigid; for the others the
/// image disc is reconstructed from three boundary points.
inline Disc isometry_image_disc(const IsometrySpec& iso, const Disc& d) {
    if (iso.family == Family::Flat)
        return {isometry_apply(iso, d.center), d.radius};
    cplx b1 = isometry_apply(iso, d.center + cplx(d.radius, 0));
    cplx b2 = isometry_apply(iso, d.center + cplx(-d.radius, 0));
    cplx b3 = isometry_apply(iso, d.center + cplx(0, d.radius));
    // circumcenter of b1,b2,b3
    cplx u = b2 - b1, v = b3 - b1;
    double cross = u.real() * v.imag() - u.imag() * v.real();
    if (std::abs(cross) < 1e-14 * (std::abs(u) + std::abs(v)))
        throw std::runtime_error("degenerate disc image");
    double u2 = std::norm(u), v2 = std::norm(v);
    double cx = (v.imag() * u2 - u.imag() * v2) / (2 * cross);
    double cy = (u.real() * v2 - v.real() * u2) / (2 * cross);
    cplx center = b1 + cplx(cx, cy);
    double radius = std::abs(b1 - center);
    if (iso.family == Family::Elliptic) {
        // reject images wrapping the point at infinity (not a planar disc)
        cplx far = isometry_apply(iso, d.center);
        if (std::abs(far - center) > radius)
            throw std::domain_error("disc image covers infinity in this chart");
    }
    return {center, radius};
}

} // namespace gafzero
