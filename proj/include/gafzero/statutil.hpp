#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace gafzero {

struct CiValue {
    double value = 0, lo = 0, hi = 0;
    double half_width() const { return 0.5 * (hi - lo); }
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

constexpr double kZ95 = 1.959963984540054;

inline double sample_mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = sample_mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

/// Normal 95% CI for the mean.
inline CiValue mean_ci(const std::vector<double>& v) {
    double m = sample_mean(v);
    double se = v.size() > 1 ? std::sqrt(sample_variance(v) / static_cast<double>(v.size())) : 0.0;
    return {m, m - kZ95 * se, m + kZ95 * se};
}

/// Wilson score interval for a binomial proportion.  With zero successes
/// the lower endpoint is 0 and the interval is the one-sided upper bound.
inline CiValue wilson_ci(long successes, long n, double z = kZ95) {
    if (n <= 0) throw std::invalid_argument("wilson_ci needs n > 0");
    double nn = static_cast<double>(n);
    double p = static_cast<double>(successes) / nn;
    double z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2 * nn)) / denom;
    double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    return {p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Kolmogorov-Smirnov distance between the empirical cdf of `values` and
/// the standard normal cdf.
inline double ks_distance_normal(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("empty sample");
    std::sort(values.begin(), values.end());
    double n = static_cast<double>(values.size());
    double d = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double F = normal_cdf(values[i]);
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
    }
    return d;
}

/// Two-sample KS distance.
inline double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// Total variation distance between two pmfs on {0,1,2,...} (shorter one
/// implicitly zero-padded).
inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    std::size_t n = std::max(p.size(), q.size());
    double s = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double a = k < p.size() ? p[k] : 0.0;
        double b = k < q.size() ? q[k] : 0.0;
        s += std::abs(a - b);
    }
    return 0.5 * s;
}

inline std::vector<double> empirical_pmf(const std::vector<long>& counts) {
    long maxc = 0;
    for (long c : counts) maxc = std::max(maxc, c);
    std::vector<double> pmf(static_cast<std::size_t>(maxc) + 1, 0.0);
    for (long c : counts) pmf[static_cast<std::size_t>(c)] += 1.0;
    for (double& x : pmf) x /= static_cast<double>(counts.size());
    return pmf;
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, m, fa, flm, fm);
    double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0) return left + right;
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = detail::simpson(f, a, b, fa, fm, fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = -t;
        x[static_cast<std::size_t>(n - 1 - i)] = t;
        double ww = 2.0 / ((1.0 - t * t) * dp * dp);
        w[static_cast<std::size_t>(i)] = ww;
        w[static_cast<std::size_t>(n - 1 - i)] = ww;
    }
}

/// Integral of f over a disc via tensor Gauss-Legendre in (radius, angle).
inline double integrate_disc(const std::function<double(std::complex<double>)>& f,
                             std::complex<double> center, double radius, int n = 64) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    double acc = 0;
    for (int i = 0; i < n; ++i) {
        double r = 0.5 * (x[static_cast<std::size_t>(i)] + 1.0) * radius;
        double wr = 0.5 * radius * w[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            double th = M_PI * (x[static_cast<std::size_t>(j)] + 1.0);
            double wt = M_PI * w[static_cast<std::size_t>(j)];
            acc += wr * wt * r * f(center + std::polar(r, th));
        }
    }
    return acc;
}

} // namespace gafzero
