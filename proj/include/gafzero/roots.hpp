#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gafzero/model.hpp"
#include "gafzero/region.hpp"
#include "gafzero/rng.hpp"

// Certified zero extraction.
//
// find_zeros pipeline:
//   1. winding number of the region boundary (adaptive contour sampling,
//      argument steps kept below pi/2, so the result is an exact integer);
//      a zero too close to the boundary triggers a random dilation of the
//      region in [1, 1+1e-3], retried up to 5 times;
//   2. the region is covered with cells sized to hold O(1) zeros each --
//      annular sectors for disc regions (every evaluation point stays
//      inside the disc, which keeps the required truncation order down),
//      squares for box regions;
//   3. for long coefficient vectors each cell gets a recentered local
//      Taylor polynomial (repeated synthetic division with certified
//      input truncation and adaptive degree), so contour and Newton work
//      inside the cell costs O(local degree) instead of O(N);
//   4. cells subdivide until each zero is isolated; isolated zeros are
//      polished by damped Newton, unresolved clusters fall back to an
//      Aberth solve of the local polynomial;
//   5. every reported zero is re-polished against the full series and the
//      certificate requires the zero count to equal the boundary winding
//      exactly.
//
// All retry randomness is drawn from the sample's own (seed, trial)
// stream, so extraction is deterministic and thread-layout independent.

namespace gafzero {

struct ZeroFindOptions {
    double residual_tol = 1e-9; // normalized: |f(z)| / sqrt(K(z,z))
    double merge_tol = 1e-8;
    int max_depth = 40;
    double boundary_floor = 1e-5; // min normalized |f| allowed on a contour
    int contour_start = 64;
    int contour_max = 1 << 20;
    int max_region_retries = 5;
    int max_tilings = 5;
    long recenter_min_terms = 80; // use local Taylor proxies above this N
    bool record_subdivision = false;
};

struct SubdivisionRecord {
    long parent_count;
    std::array<long, 5> child_counts; // unused slots stay -1
};

struct ZeroSet {
    std::vector<cplx> zeros;       // sorted by (re, im)
    std::vector<double> residuals; // |f(z_i)| / sqrt(K(z_i,z_i))
    long certified_count = 0;
    Region region{Disc{0.0, 0.0}}; // final region (after any dilation)
    bool certificate_ok = false;

    long winding_total = 0;
    double dilation_factor = 1.0;
    bool dilated = false;
    std::string diagnostic;
    std::vector<SubdivisionRecord> subdivision_log;
};

// ---------------------------------------------------------------------------
// Polynomial evaluation
// ---------------------------------------------------------------------------

inline cplx poly_eval(const std::vector<cplx>& c, cplx z) {
    cplx acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
    return acc;
}

inline void poly_eval_d(const std::vector<cplx>& c, cplx z, cplx& p, cplx& dp) {
    p = 0.0;
    dp = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
        dp = dp * z + p;
        p = p * z + c[k];
    }
}

// ---------------------------------------------------------------------------
// Local Taylor proxy
// ---------------------------------------------------------------------------

/// Polynomial recentered at `center_y` in the scaled variable
/// y = z / var_scale, usable for |y - center_y| <= trust_radius (also in
/// y units).  err_floor is the absolute roundoff floor of an evaluation
/// inside the trust disc (eps * sum |c_m| rho^m); values below it are
/// numerically meaningless and all downstream thresholds must stay above
/// it.
struct LocalPoly {
    cplx center_y;
    double var_scale = 1.0;
    double trust_radius = 0;
    double err_floor = 0;
    std::vector<cplx> c;

    cplx eval_global(cplx z) const { return poly_eval(c, z / var_scale - center_y); }
    void eval_d_global(cplx z, cplx& p, cplx& dp) const {
        poly_eval_d(c, z / var_scale - center_y, p, dp);
        dp /= var_scale;
    }
};

/// Repeated synthetic division: after pass m, work[m] is the m-th local
/// coefficient.  Degree adapts: stop once the last few scaled terms
/// |c_m| rho^m drop below the larger of rel_tail_tol and the roundoff
/// plateau (~32 eps) of the running scale, and keep decaying.  Input
/// coefficients whose whole contribution inside the trust disc is below
/// e^-50 of the dominant one are dropped up front; the dropped mass in
/// the sum |c_m| rho^m norm equals sum_k |a_k| (|center|+rho)^k exactly
/// (binomial theorem), so the truncation is certified, not heuristic.
/// The caller owns the variable scaling: `center` and `trust_radius` are
/// in the same variable as the coefficients, and var_scale must be set on
/// the result afterwards.  Returns false only when the tail fails to
/// settle within max_terms.
/// Certified input truncation index for recentering at radius
/// |center| + trust: coefficients beyond it contribute less than e^-44 of
/// the dominant term anywhere in the trust disc.
inline long recenter_input_cut(const std::vector<cplx>& a, double r_eff) {
    const long deg = static_cast<long>(a.size()) - 1;
    const double log_reff = std::log(r_eff + 1e-300);
    constexpr double ln2 = 0.6931471805599453;
    double max_log = -std::numeric_limits<double>::infinity();
    long cut = 0;
    for (long k = 0; k <= deg; ++k) {
        double ak = std::abs(a[static_cast<std::size_t>(k)]);
        if (ak <= 0) continue;
        // ilogb instead of log: cheap, and +-0.7 accuracy is irrelevant
        // against the e^-44 window
        double t = ln2 * std::ilogb(ak) + static_cast<double>(k) * log_reff;
        if (t > max_log) max_log = t;
        if (t > max_log - 44.0) cut = k;
    }
    return cut;
}

inline bool recenter_poly(const std::vector<cplx>& a, cplx center, double trust_radius,
                          long max_terms, LocalPoly& out, double rel_tail_tol = 1e-14,
                          long input_cut = -1) {
    long deg = static_cast<long>(a.size()) - 1;
    if (deg < 0) return false;
    if (input_cut < 0) input_cut = recenter_input_cut(a, std::abs(center) + trust_radius);
    deg = std::min(deg, input_cut);

    max_terms = std::min(max_terms, deg + 1);
    std::vector<cplx> work(a.begin(), a.begin() + deg + 1);
    std::vector<double> scaled; // |c_m| rho^m
    scaled.reserve(static_cast<std::size_t>(max_terms));
    out.center_y = center;
    out.var_scale = 1.0;
    out.trust_radius = trust_radius;
    out.c.clear();
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double rho_pow = 1.0, scale = 0.0;
    bool certified = false;
    for (long m = 0; m < max_terms; ++m) {
        for (long i = deg - 1; i >= m; --i)
            work[static_cast<std::size_t>(i)] +=
                work[static_cast<std::size_t>(i) + 1] * center;
        cplx cm = work[static_cast<std::size_t>(m)];
        if (!std::isfinite(cm.real()) || !std::isfinite(cm.imag())) return false;
        out.c.push_back(cm);
        double t = std::abs(cm) * rho_pow;
        scaled.push_back(t);
        scale += t;
        rho_pow *= trust_radius;
        if (m == deg) {
            certified = true; // whole polynomial recentered, exact
            break;
        }
        if (m >= 9) {
            double recent = 0, older = 0;
            for (long j = m - 3; j <= m; ++j)
                recent = std::max(recent, scaled[static_cast<std::size_t>(j)]);
            for (long j = m - 7; j <= m - 4; ++j)
                older = std::max(older, scaled[static_cast<std::size_t>(j)]);
            double tau = std::max(rel_tail_tol, 32.0 * eps) * scale;
            if (recent <= tau && recent <= 0.5 * older + tau) {
                certified = true;
                break;
            }
        }
    }
    out.err_floor = 4.0 * eps * scale;
    return certified;
}

// ---------------------------------------------------------------------------
// Cells: squares and annular sectors
// ---------------------------------------------------------------------------

namespace detail {

struct BoxGeom {
    static cplx center(const Box& b) { return 0.5 * (b.lo + b.hi); }
    static double side(const Box& b) {
        return std::max(b.hi.real() - b.lo.real(), b.hi.imag() - b.lo.imag());
    }
    static double circumradius(const Box& b) { return 0.5 * std::abs(b.hi - b.lo); }
    static bool contains(const Box& b, cplx z, double slack = 0.0) {
        return z.real() >= b.lo.real() - slack && z.real() <= b.hi.real() + slack &&
               z.imag() >= b.lo.imag() - slack && z.imag() <= b.hi.imag() + slack;
    }
    static double max_corner_abs(const Box& b) {
        double m = 0;
        for (double x : {b.lo.real(), b.hi.real()})
            for (double y : {b.lo.imag(), b.hi.imag()}) m = std::max(m, std::hypot(x, y));
        return m;
    }
};

/// Annular sector {origin + r e^{i th} : r in [r_lo, r_hi], th in
/// [th_lo, th_hi]}.  r_lo = 0 with a full angular span is a disc.
struct PolarBox {
    cplx origin;
    double r_lo, r_hi;
    double th_lo, th_hi; // th_hi - th_lo <= 2 pi
};

struct PolarGeom {
    static bool is_disc(const PolarBox& p) {
        return p.r_lo <= 0.0 && p.th_hi - p.th_lo >= 2.0 * M_PI - 1e-12;
    }
    static cplx center(const PolarBox& p) {
        if (is_disc(p)) return p.origin;
        return p.origin + std::polar(0.5 * (p.r_lo + p.r_hi), 0.5 * (p.th_lo + p.th_hi));
    }
    static double circumradius(const PolarBox& p) {
        cplx c = center(p);
        double m = 0;
        for (double r : {p.r_lo, p.r_hi})
            for (double th : {p.th_lo, 0.5 * (p.th_lo + p.th_hi), p.th_hi})
                m = std::max(m, std::abs(p.origin + std::polar(r, th) - c));
        return m;
    }
    static bool contains(const PolarBox& p, cplx z, double slack = 0.0) {
        cplx w = z - p.origin;
        double r = std::abs(w);
        if (r < p.r_lo - slack || r > p.r_hi + slack) return false;
        double span = p.th_hi - p.th_lo;
        if (span >= 2.0 * M_PI - 1e-12) return true;
        if (r < 1e-300) return p.r_lo <= slack;
        double th = std::arg(w);
        double rel = std::remainder(th - 0.5 * (p.th_lo + p.th_hi), 2.0 * M_PI);
        double ang_slack = p.r_hi > 0 ? slack / std::max(p.r_lo, 0.25 * p.r_hi) : 0.0;
        return std::abs(rel) <= 0.5 * span + ang_slack;
    }
    static double max_abs(const PolarBox& p) {
        // max |z| over the cell; cells of a disc tiling satisfy
        // max_abs <= |origin| + r_hi
        return std::abs(p.origin) + p.r_hi;
    }
    /// Boundary parametrized by arc length: outer arc, radial in, inner
    /// arc, radial out (degenerate pieces get zero length).
    static cplx boundary_point(const PolarBox& p, double t) {
        double span = p.th_hi - p.th_lo;
        bool disc = is_disc(p);
        double len_outer = p.r_hi * span;
        double len_inner = p.r_lo * span;
        double len_rad = disc ? 0.0 : (p.r_hi - p.r_lo);
        double total = len_outer + len_inner + 2.0 * len_rad;
        double s = t * total;
        if (s <= len_outer || total == len_outer)
            return p.origin + std::polar(p.r_hi, p.th_lo + s / std::max(p.r_hi, 1e-300));
        s -= len_outer;
        if (s <= len_rad)
            return p.origin + std::polar(p.r_hi - s, p.th_hi);
        s -= len_rad;
        if (s <= len_inner)
            return p.origin + std::polar(p.r_lo, p.th_hi - s / std::max(p.r_lo, 1e-300));
        s -= len_inner;
        return p.origin + std::polar(p.r_lo + s, p.th_lo);
    }
};

using CellShape = std::variant<Box, PolarBox>;

inline cplx cell_center(const CellShape& c) {
    if (const auto* b = std::get_if<Box>(&c)) return BoxGeom::center(*b);
    return PolarGeom::center(std::get<PolarBox>(c));
}

inline double cell_circumradius(const CellShape& c) {
    if (const auto* b = std::get_if<Box>(&c)) return BoxGeom::circumradius(*b);
    return PolarGeom::circumradius(std::get<PolarBox>(c));
}

inline bool cell_contains(const CellShape& c, cplx z, double slack = 0.0) {
    if (const auto* b = std::get_if<Box>(&c)) return BoxGeom::contains(*b, z, slack);
    return PolarGeom::contains(std::get<PolarBox>(c), z, slack);
}

inline double cell_max_abs(const CellShape& c) {
    if (const auto* b = std::get_if<Box>(&c)) return BoxGeom::max_corner_abs(*b);
    return PolarGeom::max_abs(std::get<PolarBox>(c));
}

inline cplx cell_boundary_point(const CellShape& c, double t) {
    if (const auto* b = std::get_if<Box>(&c)) {
        double w = b->hi.real() - b->lo.real(), h = b->hi.imag() - b->lo.imag();
        double u = 4.0 * t;
        if (u < 1.0) return b->lo + cplx(w * u, 0.0);
        if (u < 2.0) return cplx(b->hi.real(), b->lo.imag() + h * (u - 1.0));
        if (u < 3.0) return b->hi - cplx(w * (u - 2.0), 0.0);
        return cplx(b->lo.real(), b->hi.imag() - h * (u - 3.0));
    }
    return PolarGeom::boundary_point(std::get<PolarBox>(c), t);
}

/// Children tile the parent exactly.  Squares quadrisect at a jittered
/// interior point; annular sectors split at a jittered mid radius and mid
/// angle; a central disc splits into a half-radius disc plus four
/// sectors.  u, v are jitters in [0,1).
inline std::vector<CellShape> cell_split(const CellShape& c, double u, double v) {
    std::vector<CellShape> out;
    if (const auto* b = std::get_if<Box>(&c)) {
        cplx ctr = BoxGeom::center(*b);
        cplx sp = ctr + cplx((u - 0.5) * (b->hi.real() - b->lo.real()) / 6.0,
                             (v - 0.5) * (b->hi.imag() - b->lo.imag()) / 6.0);
        out.push_back(Box{b->lo, sp});
        out.push_back(Box{cplx(sp.real(), b->lo.imag()), cplx(b->hi.real(), sp.imag())});
        out.push_back(Box{cplx(b->lo.real(), sp.imag()), cplx(sp.real(), b->hi.imag())});
        out.push_back(Box{sp, b->hi});
        return out;
    }
    const auto& p = std::get<PolarBox>(c);
    if (PolarGeom::is_disc(p)) {
        double rm = p.r_hi * (0.45 + 0.1 * u);
        double th0 = 2.0 * M_PI * v;
        out.push_back(PolarBox{p.origin, 0.0, rm, th0, th0 + 2.0 * M_PI});
        for (int q = 0; q < 4; ++q)
            out.push_back(PolarBox{p.origin, rm, p.r_hi, th0 + q * M_PI_2,
                                   th0 + (q + 1) * M_PI_2});
        return out;
    }
    double rm = p.r_lo + (p.r_hi - p.r_lo) * (0.5 + (u - 0.5) / 3.0);
    double tm = p.th_lo + (p.th_hi - p.th_lo) * (0.5 + (v - 0.5) / 3.0);
    out.push_back(PolarBox{p.origin, p.r_lo, rm, p.th_lo, tm});
    out.push_back(PolarBox{p.origin, p.r_lo, rm, tm, p.th_hi});
    out.push_back(PolarBox{p.origin, rm, p.r_hi, p.th_lo, tm});
    out.push_back(PolarBox{p.origin, rm, p.r_hi, tm, p.th_hi});
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Contour winding
// ---------------------------------------------------------------------------

inline cplx boundary_point(const Region& reg, double t) {
    if (const auto* d = std::get_if<Disc>(&reg))
        return d->center + std::polar(d->radius, 2.0 * M_PI * t);
    const auto& b = std::get<Box>(reg);
    return detail::cell_boundary_point(detail::CellShape{b}, t);
}

struct WindingOutcome {
    long winding = 0;
    bool ok = false;
    double min_scaled = std::numeric_limits<double>::max();
    int points = 0;
    const char* reason = "";
};

/// Adaptive winding along a closed contour given by point_fn : [0,1) -> C.
/// f evaluates the function, scale(z) the normalization for the
/// boundary-distance floor; refinement doubles the point count until all
/// consecutive argument steps are below pi/2.
template <class F, class S, class P>
WindingOutcome winding_param(F&& f, S&& scale, P&& point_fn, const ZeroFindOptions& opt) {
    WindingOutcome out;
    int M = opt.contour_start;
    std::vector<cplx> vals(static_cast<std::size_t>(M));
    double min_scaled = std::numeric_limits<double>::max();
    for (int i = 0; i < M; ++i) {
        cplx z = point_fn(static_cast<double>(i) / M);
        cplx v = f(z);
        vals[static_cast<std::size_t>(i)] = v;
        min_scaled = std::min(min_scaled, std::abs(v) / scale(z));
    }
    for (;;) {
        out.points = M;
        out.min_scaled = min_scaled;
        if (min_scaled < opt.boundary_floor) {
            out.reason = "zero too close to contour";
            return out;
        }
        bool fine = true;
        double total = 0.0;
        for (int i = 0; i < M; ++i) {
            cplx a = vals[static_cast<std::size_t>(i)];
            cplx b = vals[static_cast<std::size_t>((i + 1) % M)];
            double d = std::arg(b * std::conj(a));
            if (std::abs(d) >= 0.5 * M_PI) {
                fine = false;
                break;
            }
            total += d;
        }
        if (fine) {
            double wind = total / (2.0 * M_PI);
            long w = std::llround(wind);
            if (std::abs(wind - static_cast<double>(w)) > 0.25) {
                out.reason = "non-integer winding";
                return out;
            }
            out.winding = w;
            out.ok = true;
            return out;
        }
        if (2 * M > opt.contour_max) {
            out.reason = "contour refinement cap";
            return out;
        }
        std::vector<cplx> next(static_cast<std::size_t>(2 * M));
        for (int i = 0; i < M; ++i) {
            next[static_cast<std::size_t>(2 * i)] = vals[static_cast<std::size_t>(i)];
            cplx z = point_fn((2.0 * i + 1.0) / (2.0 * M));
            cplx v = f(z);
            next[static_cast<std::size_t>(2 * i + 1)] = v;
            min_scaled = std::min(min_scaled, std::abs(v) / scale(z));
        }
        vals = std::move(next);
        M *= 2;
    }
}

template <class F, class S>
WindingOutcome winding_boundary(F&& f, S&& scale, const Region& reg,
                                const ZeroFindOptions& opt) {
    return winding_param(f, scale, [&](double t) { return boundary_point(reg, t); }, opt);
}

struct OuterWinding {
    Region region{Disc{0.0, 0.0}};
    double factor = 1.0;
    WindingOutcome w;
    bool ok = false;
    int attempts = 0;
};

template <class F, class S>
OuterWinding winding_region_with_retries(F&& f, S&& scale, const Region& nominal,
                                         const ZeroFindOptions& opt, std::uint64_t seed,
                                         std::uint64_t trial, std::uint64_t ctr_base) {
    OuterWinding best;
    for (int attempt = 0; attempt < opt.max_region_retries; ++attempt) {
        double factor =
            attempt == 0
                ? 1.0
                : 1.0 + 1e-3 * u01(seed, trial, ctr_base + static_cast<std::uint64_t>(attempt),
                                   rng_substream::contour);
        Region reg = dilate(nominal, factor);
        WindingOutcome w = winding_boundary(f, scale, reg, opt);
        best.attempts = attempt + 1;
        best.w = w;
        if (w.ok) {
            best.region = reg;
            best.factor = factor;
            best.ok = true;
            return best;
        }
    }
    best.region = nominal;
    return best;
}

// ---------------------------------------------------------------------------
// Aberth-Ehrlich simultaneous iteration
// ---------------------------------------------------------------------------

namespace detail {

/// Initial root estimates from the upper convex hull of (k, log|a_k|)
/// (Bini's scheme): each hull edge contributes a circle of estimates.
inline std::vector<cplx> aberth_initial(const std::vector<cplx>& a) {
    const long deg = static_cast<long>(a.size()) - 1;
    std::vector<std::pair<long, double>> pts;
    for (long k = 0; k <= deg; ++k) {
        double m = std::abs(a[static_cast<std::size_t>(k)]);
        if (m > 0) pts.emplace_back(k, std::log(m));
    }
    std::vector<std::pair<long, double>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& q = hull[hull.size() - 1];
            const auto& r = hull[hull.size() - 2];
            double lhs = (q.second - r.second) * static_cast<double>(p.first - r.first);
            double rhs = (p.second - r.second) * static_cast<double>(q.first - r.first);
            if (lhs <= rhs)
                hull.pop_back(); // q below the chord r-p: not on the upper hull
            else
                break;
        }
        hull.push_back(p);
    }
    std::vector<cplx> guesses;
    guesses.reserve(static_cast<std::size_t>(deg));
    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
        long k1 = hull[e].first, k2 = hull[e + 1].first;
        double radius = std::exp((hull[e].second - hull[e + 1].second) /
                                 static_cast<double>(k2 - k1));
        long n = k2 - k1;
        for (long j = 0; j < n; ++j) {
            double th = 2.0 * M_PI * (static_cast<double>(j) + 0.354) / static_cast<double>(n) +
                        0.58 * static_cast<double>(e + 1);
            guesses.push_back(std::polar(radius, th));
        }
    }
    while (static_cast<long>(guesses.size()) < deg)
        guesses.push_back(std::polar(1.0, 0.3 * static_cast<double>(guesses.size())));
    return guesses;
}

/// Newton quotient f/f' with chart switching: direct for |z| <= 1, via the
/// reversed polynomial g(u) = z^{-deg} f(z), u = 1/z, outside (stays
/// overflow-free however far a root estimate wanders).
inline cplx newton_quotient_charts(const std::vector<cplx>& a, const std::vector<cplx>& rev,
                                   cplx z) {
    const double deg = static_cast<double>(a.size()) - 1;
    if (std::abs(z) <= 1.0) {
        cplx p, dp;
        poly_eval_d(a, z, p, dp);
        if (p == cplx(0.0)) return 0.0;
        if (dp == cplx(0.0)) return p * 1e6; // away from a stationary point
        return p / dp;
    }
    cplx u = 1.0 / z;
    cplx g, dg;
    poly_eval_d(rev, u, g, dg);
    if (g == cplx(0.0)) return 0.0;
    cplx den = deg * g - u * dg;
    if (den == cplx(0.0)) return g * 1e6;
    return z * g / den;
}

} // namespace detail

/// All deg roots of a_0 + a_1 z + ... + a_deg z^deg (a_deg != 0).
/// Returns false if the iteration cap is hit before all corrections
/// freeze.
inline bool aberth_roots(const std::vector<cplx>& a, std::vector<cplx>& roots,
                         int max_iter = 400) {
    const long deg = static_cast<long>(a.size()) - 1;
    if (deg < 1) {
        roots.clear();
        return true;
    }
    std::vector<cplx> rev(a.rbegin(), a.rend());
    roots = detail::aberth_initial(a);
    std::vector<bool> frozen(static_cast<std::size_t>(deg), false);
    for (int it = 0; it < max_iter; ++it) {
        bool all = true;
        for (long i = 0; i < deg; ++i) {
            if (frozen[static_cast<std::size_t>(i)]) continue;
            cplx zi = roots[static_cast<std::size_t>(i)];
            cplx ni = detail::newton_quotient_charts(a, rev, zi);
            cplx s = 0.0;
            for (long j = 0; j < deg; ++j) {
                if (j == i) continue;
                cplx d = zi - roots[static_cast<std::size_t>(j)];
                if (d == cplx(0.0)) d = cplx(1e-280, 0.0);
                s += 1.0 / d;
            }
            cplx denom = 1.0 - ni * s;
            cplx corr = denom == cplx(0.0) ? ni : ni / denom;
            roots[static_cast<std::size_t>(i)] = zi - corr;
            if (std::abs(corr) <= 1e-14 * (1.0 + std::abs(zi)))
                frozen[static_cast<std::size_t>(i)] = true;
            else
                all = false;
        }
        if (all) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Cell machinery for find_zeros
// ---------------------------------------------------------------------------

namespace detail {

/// Interior probe points (center plus quadrant offsets) used to pick a
/// good Newton start.
inline std::array<cplx, 5> cell_probe_points(const CellShape& c) {
    if (const auto* b = std::get_if<Box>(&c)) {
        cplx ctr = BoxGeom::center(*b);
        double hx = 0.28 * (b->hi.real() - b->lo.real());
        double hy = 0.28 * (b->hi.imag() - b->lo.imag());
        return {ctr, ctr + cplx(hx, hy), ctr + cplx(-hx, hy), ctr + cplx(hx, -hy),
                ctr + cplx(-hx, -hy)};
    }
    const auto& p = std::get<PolarBox>(c);
    if (PolarGeom::is_disc(p)) {
        double r = 0.55 * p.r_hi;
        return {p.origin, p.origin + std::polar(r, 0.3), p.origin + std::polar(r, 0.3 + M_PI_2),
                p.origin + std::polar(r, 0.3 + M_PI), p.origin + std::polar(r, 0.3 + 3 * M_PI_2)};
    }
    double rm = 0.5 * (p.r_lo + p.r_hi), dr = 0.28 * (p.r_hi - p.r_lo);
    double tm = 0.5 * (p.th_lo + p.th_hi), dt = 0.28 * (p.th_hi - p.th_lo);
    return {p.origin + std::polar(rm, tm), p.origin + std::polar(rm + dr, tm + dt),
            p.origin + std::polar(rm - dr, tm + dt), p.origin + std::polar(rm + dr, tm - dt),
            p.origin + std::polar(rm - dr, tm - dt)};
}

template <class Eval>
bool damped_newton(const Eval& f, const ModelSpec& model, const CellShape& cell,
                   double accept_tol, cplx& out) {
    // The zero counted by this cell's winding lies strictly inside it, so
    // a result outside the cell means Newton captured a neighbour's zero:
    // reject and let the caller split instead.
    auto probes = cell_probe_points(cell);
    cplx z = probes[0];
    double best = std::numeric_limits<double>::max();
    for (cplx q : probes) {
        double v = std::abs(f.eval_global(q)) / norm_scale(model, q);
        if (v < best) {
            best = v;
            z = q;
        }
    }
    const double slack = 1e-12 * (1.0 + std::abs(z));
    const double escape = 2.0 * cell_circumradius(cell);
    cplx p, dp;
    for (int it = 0; it < 60; ++it) {
        f.eval_d_global(z, p, dp);
        double sc = norm_scale(model, z);
        if (std::abs(p) <= accept_tol * sc) {
            out = z;
            return cell_contains(cell, z, slack);
        }
        if (std::abs(dp) < 1e-290) return false;
        cplx step = p / dp;
        double lambda = 1.0;
        bool moved = false;
        double pabs = std::abs(p);
        for (int h = 0; h < 7; ++h) {
            cplx zn = z - lambda * step;
            if (std::abs(f.eval_global(zn)) < pabs) {
                z = zn;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!moved) return false;
        if (std::abs(z - cell_center(cell)) > escape) return false; // wandered off
        if (std::abs(lambda * step) <= 1e-15 * (1.0 + std::abs(z))) {
            f.eval_d_global(z, p, dp);
            out = z;
            return std::abs(p) <= accept_tol * norm_scale(model, z) &&
                   cell_contains(cell, z, slack);
        }
    }
    return false;
}

// Evaluator over the full coefficient vector (scaled variable).
struct FullEval {
    const std::vector<cplx>* poly;
    double sigma = 1.0;
    cplx eval_global(cplx z) const { return poly_eval(*poly, z / sigma); }
    void eval_d_global(cplx z, cplx& p, cplx& dp) const {
        poly_eval_d(*poly, z / sigma, p, dp);
        dp /= sigma;
    }
};

/// Radial log-derivative of the normalization scale sqrt(K(z,z)).
inline double scale_log_derivative(const ModelSpec& m, double r) {
    switch (m.family) {
        case Family::Flat: return m.intensity_L * r;
        case Family::Elliptic: return m.intensity_L * r / (1.0 + r * r);
        case Family::Hyperbolic: {
            double d = 1.0 - std::min(r * r, 0.9801);
            return m.intensity_L * r / d;
        }
    }
    return 0;
}

/// Target size of a final cell: about one expected zero per cell, capped
/// by the region size, by the kernel's scale variation across the cell
/// (so local expansions keep their roundoff floor far below the contour
/// floor), and for hyperbolic by the distance to the unit circle.
inline double target_cell_side(const ModelSpec& m, cplx center, double region_diam) {
    double s = std::norm(center);
    double inten;
    switch (m.family) {
        case Family::Flat: inten = m.intensity_L / M_PI; break;
        case Family::Elliptic: {
            double d = 1.0 + s;
            inten = m.intensity_L / (M_PI * d * d);
            break;
        }
        case Family::Hyperbolic: {
            double d = 1.0 - std::min(s, 0.9801);
            inten = m.intensity_L / (M_PI * d * d);
            break;
        }
        default: inten = 1.0;
    }
    double side = 0.8 / std::sqrt(inten);
    side = std::min(side, 11.0 / (1.0 + scale_log_derivative(m, std::abs(center))));
    if (m.family == Family::Hyperbolic)
        side = std::min(side, 0.7 * (1.0 - std::min(std::abs(center), 0.999)));
    return std::min(side, 0.75 * region_diam);
}

inline double region_diameter(const Region& reg) {
    if (const auto* d = std::get_if<Disc>(&reg)) return 2.0 * d->radius;
    const auto& b = std::get<Box>(reg);
    return std::abs(b.hi - b.lo);
}

inline bool cell_intersects(const Box& b, const Region& reg) {
    return dist_to_region(reg, BoxGeom::center(b)) <= BoxGeom::circumradius(b) + 1e-12;
}

inline void tile_box_rec(const Box& b, const Region& reg, const ModelSpec& m,
                         double region_diam, int depth, std::vector<CellShape>& out) {
    if (!cell_intersects(b, reg)) return;
    cplx c = BoxGeom::center(b);
    bool small_enough =
        BoxGeom::side(b) <= target_cell_side(m, c, region_diam) * (1.0 + 1e-9);
    if (small_enough || depth >= 60) {
        out.push_back(b);
        return;
    }
    Box q[4] = {{b.lo, c},
                {cplx(c.real(), b.lo.imag()), cplx(b.hi.real(), c.imag())},
                {cplx(b.lo.real(), c.imag()), cplx(c.real(), b.hi.imag())},
                {c, b.hi}};
    for (const Box& child : q) tile_box_rec(child, reg, m, region_diam, depth + 1, out);
}

/// Cells covering the region.  Disc regions get rings of annular sectors
/// whose every point stays inside the disc; box regions get squares, with
/// the grid shifted by a small jitter so that a retry moves every cell
/// edge away from whatever zero spoiled the previous attempt.  Disc
/// tilings jitter the ring radii and sector phases instead.
inline std::vector<CellShape> tile_region(const Region& reg, const ModelSpec& m,
                                          double jx, double jy) {
    std::vector<CellShape> cells;
    if (const auto* dsc = std::get_if<Disc>(&reg)) {
        const double R = dsc->radius;
        const cplx c0 = dsc->center;
        double diam = 2.0 * R;
        // ring radii from the rim inwards, widths tracking the local cell
        // target at the ring's outer edge
        std::vector<double> radii{R};
        double r = R;
        while (r > 0) {
            cplx probe = c0 + cplx(r, 0);
            double w = target_cell_side(m, probe, diam);
            w *= 0.85 + 0.3 * jy; // radial jitter
            if (r - w < 0.6 * w) { // absorb a sliver into the central disc
                radii.push_back(0.0);
                break;
            }
            r -= w;
            radii.push_back(r);
        }
        for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
            double ro = radii[i], ri = radii[i + 1];
            if (ri <= 0.0) {
                cells.push_back(PolarBox{c0, 0.0, ro, 0.0, 2.0 * M_PI});
                break;
            }
            double rm = 0.5 * (ro + ri);
            cplx probe = c0 + cplx(rm, 0);
            double target = target_cell_side(m, probe, diam);
            long nsec = std::max<long>(1, std::lround(2.0 * M_PI * rm / target));
            double phase = 2.0 * M_PI * (jx + 0.37 * static_cast<double>(i));
            for (long ss = 0; ss < nsec; ++ss) {
                double a = phase + 2.0 * M_PI * static_cast<double>(ss) / static_cast<double>(nsec);
                double b = phase + 2.0 * M_PI * static_cast<double>(ss + 1) / static_cast<double>(nsec);
                cells.push_back(PolarBox{c0, ri, ro, a, b});
            }
        }
        return cells;
    }
    Box bb = bounding_box(reg);
    cplx c = 0.5 * (bb.lo + bb.hi);
    double side = std::max(bb.hi.real() - bb.lo.real(), bb.hi.imag() - bb.lo.imag());
    double S = side * 1.01;
    cplx shift(4e-3 * S * (jx - 0.5), 4e-3 * S * (jy - 0.5));
    Box root{c + shift - cplx(S / 2, S / 2), c + shift + cplx(S / 2, S / 2)};
    tile_box_rec(root, reg, m, region_diameter(reg), 0, cells);
    return cells;
}

struct CellContext {
    const GafSample* s;
    const ZeroFindOptions* opt;
    std::uint64_t jitter_ctr = 1000; // counter for split jitters, contour substream
    double newton_tol = 1e-11;       // normalized accept level for Newton
    std::vector<cplx> zeros;
    std::vector<SubdivisionRecord>* log = nullptr;
    const char* fail_reason = "";
};

template <class Eval>
WindingOutcome cell_winding(const Eval& f, const ModelSpec& model, const CellShape& cell,
                            const ZeroFindOptions& opt) {
    auto scale = [&](cplx z) { return norm_scale(model, z); };
    return winding_param([&](cplx z) { return f.eval_global(z); }, scale,
                         [&](double t) { return cell_boundary_point(cell, t); }, opt);
}

template <class Eval>
bool aberth_cell_fallback(CellContext& ctx, const Eval&, const CellShape& cell, long count) {
    // Solve a local polynomial exactly; the trust radius generously covers
    // the cell so every root inside it sits below the certified tail.
    const double sigma = ctx.s->var_scale;
    LocalPoly lp;
    if (!recenter_poly(ctx.s->poly, cell_center(cell) / sigma,
                       cell_circumradius(cell) * 1.3 / sigma, 160, lp)) {
        ctx.fail_reason = "local expansion failed at max depth";
        return false;
    }
    lp.var_scale = sigma;
    long eff = static_cast<long>(lp.c.size()) - 1;
    while (eff > 0 && std::abs(lp.c[static_cast<std::size_t>(eff)]) == 0.0) --eff;
    lp.c.resize(static_cast<std::size_t>(eff) + 1);
    std::vector<cplx> roots;
    if (!aberth_roots(lp.c, roots)) {
        ctx.fail_reason = "aberth fallback did not converge";
        return false;
    }
    std::vector<cplx> inside;
    for (cplx w : roots) {
        cplx z = (lp.center_y + w) * sigma;
        if (cell_contains(cell, z, 1e-12 * (1.0 + std::abs(z)))) inside.push_back(z);
    }
    if (static_cast<long>(inside.size()) != count) {
        ctx.fail_reason = "aberth fallback count mismatch";
        return false;
    }
    for (cplx z : inside) ctx.zeros.push_back(z);
    return true;
}

template <class Eval>
bool process_cell_rec(CellContext& ctx, const Eval& f, const CellShape& cell, long count,
                      int depth) {
    const ZeroFindOptions& opt = *ctx.opt;
    const ModelSpec& model = ctx.s->model;
    if (count == 0) return true;
    if (count == 1) {
        cplx z;
        if (damped_newton(f, model, cell, ctx.newton_tol, z)) {
            ctx.zeros.push_back(z);
            return true;
        }
        // fall through to a split: a smaller cell conditions Newton better
    }
    double sz = cell_circumradius(cell);
    if (depth >= opt.max_depth || sz < 1e-8 * (1.0 + std::abs(cell_center(cell))))
        return aberth_cell_fallback(ctx, f, cell, count);

    for (int attempt = 0; attempt < 5; ++attempt) {
        double u = u01(ctx.s->seed, ctx.s->trial_index, ctx.jitter_ctr++, rng_substream::contour);
        double v = u01(ctx.s->seed, ctx.s->trial_index, ctx.jitter_ctr++, rng_substream::contour);
        auto children = cell_split(cell, u, v);
        std::array<long, 5> counts{-1, -1, -1, -1, -1};
        bool ok = true;
        long total = 0;
        for (std::size_t i = 0; i < children.size(); ++i) {
            WindingOutcome w = cell_winding(f, model, children[i], opt);
            if (!w.ok) {
                ok = false;
                break;
            }
            counts[i] = w.winding;
            total += w.winding;
        }
        if (!ok || total != count) continue; // re-jitter the split
        if (ctx.log) ctx.log->push_back({count, counts});
        for (std::size_t i = 0; i < children.size(); ++i)
            if (counts[i] > 0)
                if (!process_cell_rec(ctx, f, children[i], counts[i], depth + 1)) return false;
        return true;
    }
    ctx.fail_reason = "subdivision split failed";
    return false;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

struct WindingCountResult {
    long count = 0;
    bool ok = false;
    double dilation_factor = 1.0;
    bool dilated = false;
    int attempts = 0;
    const char* reason = "";
};

/// Argument-principle count of zeros in a region (exact integer by
/// construction).  The region is randomly dilated and retried when a zero
/// sits too close to the boundary.
inline WindingCountResult winding_count(const GafSample& s, const Region& region,
                                        const ZeroFindOptions& opt = {}) {
    auto f = [&](cplx z) { return poly_eval(s.poly, z / s.var_scale); };
    auto scale = [&](cplx z) { return norm_scale(s.model, z); };
    OuterWinding ow = winding_region_with_retries(f, scale, region, opt, s.seed,
                                                  s.trial_index, 0);
    WindingCountResult r;
    r.attempts = ow.attempts;
    if (!ow.ok) {
        r.reason = ow.w.reason;
        return r;
    }
    r.count = ow.w.winding;
    r.ok = true;
    r.dilation_factor = ow.factor;
    r.dilated = ow.factor != 1.0;
    return r;
}

/// Certification radius the harness must cover before calling find_zeros.
/// Disc regions are tiled with annular sectors that never leave the disc,
/// so only the dilation retries matter; box tilings can protrude by up to
/// a cell.
inline double required_radius(const ModelSpec& m, const Region& region) {
    Region worst = dilate(region, 1.0 + 1.1e-3);
    if (std::holds_alternative<Disc>(region)) return sup_abs(worst) * (1.0 + 1e-9);
    auto cells = detail::tile_region(worst, m, 0.5, 0.5);
    double r = sup_abs(worst);
    double max_side = 0;
    for (const auto& c : cells) {
        r = std::max(r, detail::cell_max_abs(c));
        max_side = std::max(max_side, 2.0 * detail::cell_circumradius(c));
    }
    Box bb = bounding_box(worst);
    double S = 1.01 * std::max(bb.hi.real() - bb.lo.real(), bb.hi.imag() - bb.lo.imag());
    return r + 4e-3 * S + 0.1 * max_side;
}

/// Extract the certified zero set of the sample in a region.
inline ZeroSet find_zeros(const GafSample& s, const Region& region,
                          const ZeroFindOptions& opt = {}) {
    ZeroSet out;
    out.region = region;
    if (s.model.family == Family::Hyperbolic && sup_abs(region) >= 1.0)
        throw std::domain_error("region leaves the unit disc");
    detail::FullEval f{&s.poly, s.var_scale};
    auto feval = [&](cplx z) { return poly_eval(s.poly, z / s.var_scale); };
    auto scale = [&](cplx z) { return norm_scale(s.model, z); };

    OuterWinding ow =
        winding_region_with_retries(feval, scale, region, opt, s.seed, s.trial_index, 0);
    if (!ow.ok) {
        out.diagnostic = ow.w.reason;
        return out;
    }
    out.region = ow.region;
    out.winding_total = ow.w.winding;
    out.dilation_factor = ow.factor;
    out.dilated = ow.factor != 1.0;
    if (ow.w.winding == 0) {
        out.certificate_ok = true;
        return out;
    }

    bool processed = false;
    std::vector<SubdivisionRecord> sublog;
    std::vector<cplx> raw;
    const char* why = "";
    const bool recenter_ok = static_cast<long>(s.poly.size()) >= opt.recenter_min_terms;
    for (int tiling = 0; tiling < opt.max_tilings && !processed; ++tiling) {
        double jx = u01(s.seed, s.trial_index, 2 * static_cast<std::uint64_t>(tiling),
                        rng_substream::tiling);
        double jy = u01(s.seed, s.trial_index, 2 * static_cast<std::uint64_t>(tiling) + 1,
                        rng_substream::tiling);
        auto cells = detail::tile_region(ow.region, s.model, jx, jy);
        detail::CellContext ctx;
        ctx.s = &s;
        ctx.opt = &opt;
        ctx.jitter_ctr = 1000 + 1'000'000 * static_cast<std::uint64_t>(tiling);
        if (opt.record_subdivision) ctx.log = &sublog;
        bool ok = true;
        // input-cut cache: cells of one ring share the same effective
        // radius, so the O(N) magnitude scan runs once per ring
        double cache_reff = -1.0;
        long cache_cut = -1;
        for (const auto& cell : cells) {
            if (detail::cell_max_abs(cell) > s.certified_radius * (1.0 + 1e-9)) {
                ok = false;
                ctx.fail_reason = "cell outside certified radius";
                break;
            }
            cplx cc = detail::cell_center(cell);
            double trust = detail::cell_circumradius(cell) * 1.1;
            // proxy roundoff floor, normalized by the smallest kernel
            // scale in the cell (the kernel grows radially in |z| for all
            // three families, so the minimum sits nearest the origin)
            double min_abs = std::max(0.0, std::abs(cc) - detail::cell_circumradius(cell));
            double min_scale = norm_scale(s.model, std::polar(
                s.model.family == Family::Hyperbolic ? std::min(min_abs, 0.999) : min_abs,
                0.0));
            LocalPoly lp;
            bool use_local = recenter_ok;
            if (use_local) {
                double reff = (std::abs(cc) + trust) / s.var_scale;
                if (cache_reff < 0 || std::abs(reff - cache_reff) > 0.02 * reff + 1e-12) {
                    cache_cut = recenter_input_cut(s.poly, reff * 1.03);
                    cache_reff = reff;
                }
                use_local = recenter_poly(
                    s.poly, cc / s.var_scale, trust / s.var_scale,
                    std::min<long>(160, static_cast<long>(s.poly.size())), lp, 1e-14,
                    cache_cut);
                lp.var_scale = s.var_scale;
            }
            double floor_norm = use_local ? lp.err_floor / min_scale : 1e-15;
            if (use_local && floor_norm > 0.2 * opt.boundary_floor)
                use_local = false; // proxy too noisy here: full series instead
            bool cell_ok;
            if (use_local) {
                ctx.newton_tol =
                    std::max({opt.residual_tol * 0.5, 1e-12, 30.0 * floor_norm});
                WindingOutcome w = detail::cell_winding(lp, s.model, cell, opt);
                cell_ok = w.ok && detail::process_cell_rec(ctx, lp, cell, w.winding, 0);
                if (!cell_ok && ctx.fail_reason[0] == 0) ctx.fail_reason = w.reason;
            } else {
                ctx.newton_tol = std::max(opt.residual_tol * 0.5, 1e-12);
                WindingOutcome w = detail::cell_winding(f, s.model, cell, opt);
                cell_ok = w.ok && detail::process_cell_rec(ctx, f, cell, w.winding, 0);
                if (!cell_ok && ctx.fail_reason[0] == 0) ctx.fail_reason = w.reason;
            }
            if (!cell_ok) {
                ok = false;
                break;
            }
        }
        if (ok) {
            raw = std::move(ctx.zeros);
            processed = true;
        } else {
            why = ctx.fail_reason;
            sublog.clear();
        }
    }
    if (!processed) {
        out.diagnostic = std::string("tiling failed: ") + why;
        return out;
    }
    out.subdivision_log = std::move(sublog);

    // keep zeros in the (dilated) region, sort, merge near-duplicates
    std::vector<cplx> kept;
    for (cplx z : raw)
        if (contains(out.region, z)) kept.push_back(z);
    std::sort(kept.begin(), kept.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<cplx> unique;
    for (cplx z : kept) {
        bool dup = false;
        for (std::size_t j = unique.size(); j-- > 0;) {
            if (z.real() - unique[j].real() > opt.merge_tol) break;
            if (std::abs(z - unique[j]) <= opt.merge_tol) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(z);
    }

    // final polish + residuals against the full series
    out.zeros.reserve(unique.size());
    out.residuals.reserve(unique.size());
    double max_resid = 0;
    for (cplx z : unique) {
        cplx p, dp;
        for (int it = 0; it < 4; ++it) {
            f.eval_d_global(z, p, dp);
            if (std::abs(dp) < 1e-290) break;
            cplx step = p / dp;
            if (std::abs(step) > 0.1 * (1.0 + std::abs(z))) break; // do not wander
            z -= step;
            if (std::abs(step) <= 1e-16 * (1.0 + std::abs(z))) break;
        }
        double resid = std::abs(f.eval_global(z)) / norm_scale(s.model, z);
        out.zeros.push_back(z);
        out.residuals.push_back(resid);
        max_resid = std::max(max_resid, resid);
    }
    std::sort(out.zeros.begin(), out.zeros.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });

    double min_sep = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < out.zeros.size(); ++i)
        for (std::size_t j = i + 1; j < out.zeros.size(); ++j)
            min_sep = std::min(min_sep, std::abs(out.zeros[i] - out.zeros[j]));

    out.certified_count = static_cast<long>(out.zeros.size());
    out.certificate_ok = out.certified_count == out.winding_total &&
                         max_resid <= opt.residual_tol &&
                         (out.zeros.size() < 2 || min_sep > opt.merge_tol);
    if (!out.certificate_ok && out.diagnostic.empty()) {
        if (out.certified_count != out.winding_total)
            out.diagnostic = "count mismatch vs boundary winding";
        else if (max_resid > opt.residual_tol)
            out.diagnostic = "residual above tolerance";
        else
            out.diagnostic = "zeros closer than merge tolerance";
    }
    return out;
}

/// All roots of an elliptic sample (a degree-L polynomial) by
/// Aberth-Ehrlich, residuals in the sphere-normalized metric
/// |f(z)| / sqrt((1+|z|^2)^L), which stays meaningful at large |z|.
inline ZeroSet elliptic_roots(const GafSample& s, const ZeroFindOptions& opt = {}) {
    if (s.model.family != Family::Elliptic)
        throw std::invalid_argument("elliptic_roots requires an elliptic sample");
    ZeroSet out;
    out.region = Disc{0.0, std::numeric_limits<double>::infinity()};
    long deg = static_cast<long>(s.poly.size()) - 1;
    while (deg > 0 && s.poly[static_cast<std::size_t>(deg)] == cplx(0.0)) --deg;
    if (deg <= 0) {
        out.certificate_ok = s.poly[0] != cplx(0.0);
        out.diagnostic = out.certificate_ok ? "" : "identically degenerate sample";
        return out;
    }
    std::vector<cplx> a(s.poly.begin(), s.poly.begin() + deg + 1);
    std::vector<cplx> rev(a.rbegin(), a.rend());
    const double L = s.model.intensity_L;
    auto residual = [&](cplx z) {
        double az = std::abs(z);
        double logf;
        if (az <= 1.0) {
            double v = std::abs(poly_eval(a, z));
            if (v == 0.0) return 0.0;
            logf = std::log(v);
        } else {
            cplx u = 1.0 / z;
            double v = std::abs(poly_eval(rev, u));
            if (v == 0.0) return 0.0;
            logf = static_cast<double>(deg) * std::log(az) + std::log(v);
        }
        return std::exp(logf - 0.5 * L * std::log1p(az * az));
    };

    std::vector<cplx> roots;
    bool converged = aberth_roots(a, roots);
    double max_resid = 0;
    if (converged)
        for (cplx z : roots) max_resid = std::max(max_resid, residual(z));
    if (!converged || max_resid > opt.residual_tol) {
        // enclosing-disc fallback: Fujiwara bound caps all root moduli, and
        // the boundary winding of that disc certifies the count
        double bound = 0;
        for (long k = 0; k < deg; ++k) {
            double t = std::pow(std::abs(a[static_cast<std::size_t>(k)]) /
                                    std::abs(a[static_cast<std::size_t>(deg)]),
                                1.0 / static_cast<double>(deg - k));
            bound = std::max(bound, t);
        }
        ZeroSet fb = find_zeros(s, Disc{0.0, 2.0 * bound + 1.0}, opt);
        fb.region = out.region;
        if (fb.certified_count != deg) {
            fb.certificate_ok = false;
            if (fb.diagnostic.empty()) fb.diagnostic = "fallback count != degree";
        }
        return fb;
    }

    std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    double min_sep = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            min_sep = std::min(min_sep, std::abs(roots[i] - roots[j]));
    out.zeros = std::move(roots);
    out.residuals.reserve(out.zeros.size());
    for (cplx z : out.zeros) out.residuals.push_back(residual(z));
    out.winding_total = deg;
    out.certified_count = static_cast<long>(out.zeros.size());
    out.certificate_ok = out.certified_count == deg && max_resid <= opt.residual_tol &&
                         (out.zeros.size() < 2 || min_sep > opt.merge_tol);
    if (!out.certificate_ok) out.diagnostic = "roots not simple at merge tolerance";
    return out;
}

/// Coefficients of z -> f(e^{i theta} z + a) for a flat isometry: the
/// zero-set covariance property test composes samples this way.
inline GafSample compose_with_flat_isometry(const GafSample& s, const IsometrySpec& iso,
                                            double new_certified_radius) {
    if (iso.family != Family::Flat || s.model.family != Family::Flat)
        throw std::invalid_argument("flat isometry composition only");
    const long N = static_cast<long>(s.poly.size()) - 1;
    const double sigma = s.var_scale;
    // s.poly holds P with f(z) = P(z/sigma); composing with the isometry
    // in the scaled variable keeps every quantity representable:
    // f(rot z + a) = P(rot y + a/sigma).
    const cplx rot = iso.p1, a = iso.p2 / sigma;
    std::vector<cplx> b(static_cast<std::size_t>(N) + 1);
    cplx rot_m = 1.0;
    for (long m = 0; m <= N; ++m) {
        cplx acc = 0.0;
        cplx cum = 1.0; // C(k,m) a^{k-m}, updated iteratively over k
        for (long k = m; k <= N; ++k) {
            acc += s.poly[static_cast<std::size_t>(k)] * cum;
            cum *= a * static_cast<double>(k + 1) / static_cast<double>(k + 1 - m);
        }
        b[static_cast<std::size_t>(m)] = rot_m * acc;
        rot_m *= rot;
    }
    // back to unit-variance coefficients: zeta_m = b_m / (w_m sigma^m)
    std::vector<cplx> zeta(b.size());
    const double log_sigma = std::log(sigma);
    double acc_w = 0.0;
    for (long k = 0; k <= N; ++k) {
        zeta[static_cast<std::size_t>(k)] =
            b[static_cast<std::size_t>(k)] *
            std::exp(-(0.5 * acc_w + static_cast<double>(k) * log_sigma));
        acc_w += log_weight_sq_ratio(s.model, k);
    }
    return sample_from_coeffs(s.model, std::move(zeta), new_certified_radius);
}

} // namespace gafzero
