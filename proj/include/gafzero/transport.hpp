#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "gafzero/stats.hpp"

// Matching flat-CAZP zero sets to the lattice sqrt(pi) Z^2, the AKT
// uniform-points baseline, and the delta-subharmonic transport inequality
// check on the smoothed random potential.

namespace gafzero {

enum class MatchMode { MinCostSum, MinBottleneck };

struct MatchingResult {
    std::vector<std::pair<cplx, cplx>> pairs; // (a, b) matched
    std::vector<cplx> unmatched_a, unmatched_b;
    std::vector<cplx> displacements; // b - a per pair
    double total_cost = 0;           // sum |xi| (MinCostSum) or max |xi| (bottleneck)
    double mean_cost = 0;
    MatchMode algorithm = MatchMode::MinCostSum;
};

namespace detail {

/// Dense linear assignment (Jonker-Volgenant): column reduction,
/// augmenting row reduction, then shortest augmenting paths.  cost(i,j)
/// is called on demand; rows must not outnumber columns.  Exact optimum.
inline std::vector<long> lap_jv(long n, const std::function<double(long, long)>& cost) {
    const double INF = std::numeric_limits<double>::max();
    std::vector<long> x(static_cast<std::size_t>(n), -1); // row -> col
    std::vector<long> y(static_cast<std::size_t>(n), -1); // col -> row
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);

    // column reduction
    std::vector<long> matches(static_cast<std::size_t>(n), 0);
    for (long j = n - 1; j >= 0; --j) {
        double mn = cost(0, j);
        long imin = 0;
        for (long i = 1; i < n; ++i) {
            double c = cost(i, j);
            if (c < mn) {
                mn = c;
                imin = i;
            }
        }
        v[static_cast<std::size_t>(j)] = mn;
        if (++matches[static_cast<std::size_t>(imin)] == 1) {
            x[static_cast<std::size_t>(imin)] = j;
            y[static_cast<std::size_t>(j)] = imin;
        }
    }

    std::vector<long> free_rows;
    for (long i = 0; i < n; ++i)
        if (matches[static_cast<std::size_t>(i)] == 0) free_rows.push_back(i);

    // augmenting row reduction, two sweeps
    for (int sweep = 0; sweep < 2; ++sweep) {
        std::vector<long> next_free;
        for (long fi = 0; fi < static_cast<long>(free_rows.size()); ++fi) {
            long i = free_rows[static_cast<std::size_t>(fi)];
            double u1 = INF, u2 = INF;
            long j1 = -1, j2 = -1;
            for (long j = 0; j < n; ++j) {
                double h = cost(i, j) - v[static_cast<std::size_t>(j)];
                if (h < u1) {
                    u2 = u1;
                    j2 = j1;
                    u1 = h;
                    j1 = j;
                } else if (h < u2) {
                    u2 = h;
                    j2 = j;
                }
            }
            long i0 = y[static_cast<std::size_t>(j1)];
            if (u1 < u2) {
                v[static_cast<std::size_t>(j1)] -= u2 - u1;
            } else if (i0 >= 0 && j2 >= 0) {
                j1 = j2;
                i0 = y[static_cast<std::size_t>(j1)];
            }
            x[static_cast<std::size_t>(i)] = j1;
            y[static_cast<std::size_t>(j1)] = i;
            if (i0 >= 0) {
                x[static_cast<std::size_t>(i0)] = -1;
                if (u1 < u2)
                    next_free.insert(next_free.begin(), i0); // retry soon
                else
                    next_free.push_back(i0);
            }
        }
        free_rows = std::move(next_free);
        if (free_rows.empty()) break;
    }

    // shortest augmenting paths for the remaining free rows
    std::vector<double> d(static_cast<std::size_t>(n));
    std::vector<long> pred(static_cast<std::size_t>(n));
    std::vector<char> done(static_cast<std::size_t>(n));
    for (long fr : free_rows) {
        std::fill(done.begin(), done.end(), 0);
        for (long j = 0; j < n; ++j) {
            d[static_cast<std::size_t>(j)] = cost(fr, j) - v[static_cast<std::size_t>(j)];
            pred[static_cast<std::size_t>(j)] = fr;
        }
        long endj = -1;
        double mind = 0;
        std::vector<long> scanned;
        for (;;) {
            long jmin = -1;
            mind = INF;
            for (long j = 0; j < n; ++j)
                if (!done[static_cast<std::size_t>(j)] && d[static_cast<std::size_t>(j)] < mind) {
                    mind = d[static_cast<std::size_t>(j)];
                    jmin = j;
                }
            if (jmin < 0) throw std::runtime_error("assignment: no augmenting path");
            done[static_cast<std::size_t>(jmin)] = 1;
            scanned.push_back(jmin);
            long i = y[static_cast<std::size_t>(jmin)];
            if (i < 0) {
                endj = jmin;
                break;
            }
            for (long j = 0; j < n; ++j) {
                if (done[static_cast<std::size_t>(j)]) continue;
                double nd = mind + cost(i, j) - v[static_cast<std::size_t>(j)] -
                            (cost(i, jmin) - v[static_cast<std::size_t>(jmin)]);
                if (nd < d[static_cast<std::size_t>(j)]) {
                    d[static_cast<std::size_t>(j)] = nd;
                    pred[static_cast<std::size_t>(j)] = i;
                }
            }
        }
        for (long j : scanned)
            if (j != endj)
                v[static_cast<std::size_t>(j)] += d[static_cast<std::size_t>(j)] - mind;
        // augment along the predecessor chain
        long j = endj;
        for (;;) {
            long i = pred[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(j)] = i;
            std::swap(x[static_cast<std::size_t>(i)], j);
            if (j < 0) break;
        }
    }
    return x;
}

/// Hopcroft-Karp maximum bipartite matching on a threshold graph:
/// edge (i,j) present iff |a_i - b_j| <= radius.
inline long hopcroft_karp(const std::vector<cplx>& a, const std::vector<cplx>& b,
                          double radius, std::vector<long>& match_a) {
    const long n = static_cast<long>(a.size()), m = static_cast<long>(b.size());
    std::vector<std::vector<long>> adj(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < m; ++j)
            if (std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(j)]) <=
                radius)
                adj[static_cast<std::size_t>(i)].push_back(j);
    match_a.assign(static_cast<std::size_t>(n), -1);
    std::vector<long> match_b(static_cast<std::size_t>(m), -1);
    const long INF = std::numeric_limits<long>::max();
    std::vector<long> dist(static_cast<std::size_t>(n));
    auto bfs = [&]() {
        std::queue<long> q;
        for (long i = 0; i < n; ++i) {
            if (match_a[static_cast<std::size_t>(i)] < 0) {
                dist[static_cast<std::size_t>(i)] = 0;
                q.push(i);
            } else
                dist[static_cast<std::size_t>(i)] = INF;
        }
        bool found = false;
        while (!q.empty()) {
            long i = q.front();
            q.pop();
            for (long j : adj[static_cast<std::size_t>(i)]) {
                long i2 = match_b[static_cast<std::size_t>(j)];
                if (i2 < 0)
                    found = true;
                else if (dist[static_cast<std::size_t>(i2)] == INF) {
                    dist[static_cast<std::size_t>(i2)] = dist[static_cast<std::size_t>(i)] + 1;
                    q.push(i2);
                }
            }
        }
        return found;
    };
    std::function<bool(long)> dfs = [&](long i) {
        for (long j : adj[static_cast<std::size_t>(i)]) {
            long i2 = match_b[static_cast<std::size_t>(j)];
            if (i2 < 0 || (dist[static_cast<std::size_t>(i2)] ==
                               dist[static_cast<std::size_t>(i)] + 1 &&
                           dfs(i2))) {
                match_a[static_cast<std::size_t>(i)] = j;
                match_b[static_cast<std::size_t>(j)] = i;
                return true;
            }
        }
        dist[static_cast<std::size_t>(i)] = INF;
        return false;
    };
    long matched = 0;
    while (bfs())
        for (long i = 0; i < n; ++i)
            if (match_a[static_cast<std::size_t>(i)] < 0 && dfs(i)) ++matched;
    return matched;
}

} // namespace detail

/// Optimal matching of the smaller list into the larger.  MinCostSum
/// minimizes the summed Euclidean displacement exactly; MinBottleneck
/// minimizes the largest displacement via binary search over candidate
/// radii with Hopcroft-Karp feasibility (the algorithmic form of Hall's
/// condition).
inline MatchingResult match_points(const std::vector<cplx>& A, const std::vector<cplx>& B,
                                   MatchMode mode = MatchMode::MinCostSum,
                                   long size_cap = 4096) {
    if (A.empty() || B.empty()) throw std::invalid_argument("point lists must be nonempty");
    if (static_cast<long>(std::max(A.size(), B.size())) > size_cap)
        throw std::invalid_argument("instance exceeds the size cap");
    const bool swapped = A.size() > B.size();
    const std::vector<cplx>& small = swapped ? B : A;
    const std::vector<cplx>& big = swapped ? A : B;
    const long n = static_cast<long>(small.size()), m = static_cast<long>(big.size());

    std::vector<long> assign(static_cast<std::size_t>(n), -1);
    if (mode == MatchMode::MinCostSum) {
        // pad with zero-cost dummy rows to square; dummies soak up the
        // surplus columns without touching the real optimum
        auto cost = [&](long i, long j) {
            return i < n ? std::abs(small[static_cast<std::size_t>(i)] -
                                    big[static_cast<std::size_t>(j)])
                         : 0.0;
        };
        auto x = detail::lap_jv(m, cost);
        for (long i = 0; i < n; ++i) assign[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
    } else {
        std::vector<double> cand;
        cand.reserve(static_cast<std::size_t>(n * m));
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < m; ++j)
                cand.push_back(std::abs(small[static_cast<std::size_t>(i)] -
                                        big[static_cast<std::size_t>(j)]));
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        long lo = 0, hi = static_cast<long>(cand.size()) - 1;
        std::vector<long> tmp;
        while (lo < hi) {
            long mid = (lo + hi) / 2;
            if (detail::hopcroft_karp(small, big, cand[static_cast<std::size_t>(mid)], tmp) == n)
                hi = mid;
            else
                lo = mid + 1;
        }
        detail::hopcroft_karp(small, big, cand[static_cast<std::size_t>(lo)], assign);
    }

    MatchingResult res;
    res.algorithm = mode;
    std::vector<char> used_big(big.size(), 0);
    double total = 0, worst = 0;
    for (long i = 0; i < n; ++i) {
        long j = assign[static_cast<std::size_t>(i)];
        if (j < 0) continue;
        used_big[static_cast<std::size_t>(j)] = 1;
        cplx pa = swapped ? big[static_cast<std::size_t>(j)] : small[static_cast<std::size_t>(i)];
        cplx pb = swapped ? small[static_cast<std::size_t>(i)] : big[static_cast<std::size_t>(j)];
        res.pairs.emplace_back(pa, pb);
        cplx xi = pb - pa;
        res.displacements.push_back(xi);
        total += std::abs(xi);
        worst = std::max(worst, std::abs(xi));
    }
    for (std::size_t j = 0; j < big.size(); ++j)
        if (!used_big[j]) {
            if (swapped)
                res.unmatched_a.push_back(big[j]);
            else
                res.unmatched_b.push_back(big[j]);
        }
    res.total_cost = mode == MatchMode::MinCostSum ? total : worst;
    res.mean_cost = res.pairs.empty() ? 0.0 : total / static_cast<double>(res.pairs.size());
    return res;
}

// ---------------------------------------------------------------------------
// Lattice matching experiment
// ---------------------------------------------------------------------------

inline std::vector<cplx> lattice_points_in_window(double halfwidth) {
    const double spacing = std::sqrt(M_PI);
    std::vector<cplx> pts;
    long kmax = static_cast<long>(std::floor(halfwidth / spacing));
    for (long k = -kmax; k <= kmax; ++k)
        for (long l = -kmax; l <= kmax; ++l)
            pts.emplace_back(spacing * static_cast<double>(k), spacing * static_cast<double>(l));
    return pts;
}

/// Windowed analogue of the perturbed-lattice representation: match flat
/// zeros in [-s,s]^2 to sqrt(pi) Z^2, keep displacements whose lattice
/// point lies in the inner half window (edge mitigation), report tails
/// and exponential moments.
inline ExperimentSummary lattice_match_experiment(double halfwidth, long trials,
                                                  std::uint64_t seed,
                                                  MatchMode mode = MatchMode::MinCostSum,
                                                  int workers = default_workers()) {
    ExperimentSummary sum;
    sum.name = "match";
    sum.model = ModelSpec(Family::Flat, 1.0);
    sum.trials = trials;
    sum.seed = seed;
    sum.workers = workers;
    sum.params["halfwidth"] = halfwidth;
    Box window{cplx(-halfwidth, -halfwidth), cplx(halfwidth, halfwidth)};
    ExtractionPlan plan = make_extraction_plan(sum.model, Region{window});
    auto lattice = lattice_points_in_window(halfwidth);
    sum.params["lattice_points"] = static_cast<double>(lattice.size());

    struct TrialOut {
        std::vector<cplx> xi;
        bool ok = false;
        bool flagged = false;
    };
    std::vector<TrialOut> outs(static_cast<std::size_t>(trials));
    const double inner = 0.5 * halfwidth;
    parallel_for(trials, workers, [&](long t) {
        TrialZeros tz = run_extraction(plan, seed, static_cast<std::uint64_t>(t));
        if (tz.discard) return;
        TrialOut& o = outs[static_cast<std::size_t>(t)];
        o.ok = true;
        double mismatch = std::abs(static_cast<double>(tz.count) -
                                   static_cast<double>(lattice.size()));
        o.flagged = mismatch > 0.1 * static_cast<double>(lattice.size());
        if (tz.zeros.empty()) return;
        auto mr = match_points(lattice, tz.zeros, mode);
        for (const auto& pr : mr.pairs) {
            cplx lat = pr.first;
            if (std::abs(lat.real()) <= inner && std::abs(lat.imag()) <= inner)
                o.xi.push_back(pr.second - pr.first);
        }
    });

    std::vector<cplx> xi;
    long flagged = 0, used = 0;
    std::vector<double> trial_moment[3];
    const double eps_grid[3] = {0.05, 0.1, 0.2};
    for (const auto& o : outs) {
        if (!o.ok) continue;
        ++used;
        if (o.flagged) ++flagged;
        for (cplx v : o.xi) xi.push_back(v);
        if (!o.xi.empty())
            for (int e = 0; e < 3; ++e) {
                double acc = 0;
                for (cplx v : o.xi) acc += std::exp(eps_grid[e] * std::norm(v));
                trial_moment[e].push_back(acc / static_cast<double>(o.xi.size()));
            }
    }
    sum.discards = trials - used;
    sum.params["flagged"] = static_cast<double>(flagged);
    sum.params["pairs"] = static_cast<double>(xi.size());

    cplx mean_xi = 0;
    for (cplx v : xi) mean_xi += v;
    if (!xi.empty()) mean_xi /= static_cast<double>(xi.size());
    double var_xi = 0;
    for (cplx v : xi) var_xi += std::norm(v - mean_xi);
    if (xi.size() > 1) var_xi /= static_cast<double>(xi.size() - 1);
    double se = std::sqrt(var_xi / std::max<std::size_t>(1, xi.size()) / 2.0);
    sum.estimates["mean_xi_re"] = {mean_xi.real(), mean_xi.real() - kZ95 * se,
                                   mean_xi.real() + kZ95 * se};
    sum.estimates["mean_xi_im"] = {mean_xi.imag(), mean_xi.imag() - kZ95 * se,
                                   mean_xi.imag() + kZ95 * se};
    std::vector<double> absxi;
    for (cplx v : xi) absxi.push_back(std::abs(v));
    sum.estimates["mean_abs_xi"] = mean_ci(absxi);
    for (int e = 0; e < 3; ++e) {
        auto ci = mean_ci(trial_moment[e]);
        char key[32];
        std::snprintf(key, sizeof key, "exp_moment_%.2f", eps_grid[e]);
        sum.estimates[key] = ci;
    }

    Table tail;
    tail.columns = {"lambda", "tail_prob", "wilson_lo", "wilson_hi"};
    for (double lam = 0.25; lam <= 4.0 + 1e-9; lam += 0.25) {
        long ev = 0;
        for (double v : absxi)
            if (v > lam) ++ev;
        CiValue ci = wilson_ci(ev, static_cast<long>(absxi.size()));
        tail.rows.push_back({lam, ci.value, ci.lo, ci.hi});
    }
    sum.tables["tail"] = std::move(tail);
    sum.finish_validity();
    return sum;
}

// ---------------------------------------------------------------------------
// AKT baseline
// ---------------------------------------------------------------------------

/// N^2 uniform points in [0,N]^2 matched to the integer grid; T is the
/// mean matched displacement.
inline ExperimentSummary akt_baseline(long N, long trials, std::uint64_t seed,
                                      int workers = default_workers()) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    ExperimentSummary sum;
    sum.name = "akt";
    sum.model = ModelSpec(Family::Flat, 1.0, "akt-baseline");
    sum.trials = trials;
    sum.seed = seed;
    sum.workers = workers;
    sum.params["N"] = static_cast<double>(N);
    std::vector<cplx> grid;
    for (long i = 0; i < N; ++i)
        for (long j = 0; j < N; ++j)
            grid.emplace_back(static_cast<double>(i), static_cast<double>(j));
    std::vector<double> T(static_cast<std::size_t>(trials));
    parallel_for(trials, workers, [&](long t) {
        std::vector<cplx> pts(grid.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double ux = u01(seed, static_cast<std::uint64_t>(t), 2 * i, rng_substream::aux);
            double uy = u01(seed, static_cast<std::uint64_t>(t), 2 * i + 1, rng_substream::aux);
            pts[i] = cplx(N * ux, N * uy);
        }
        auto mr = match_points(pts, grid, MatchMode::MinCostSum);
        T[static_cast<std::size_t>(t)] = mr.mean_cost;
    });
    sum.estimates["T"] = mean_ci(T);
    if (N >= 2) {
        double s = std::sqrt(std::log(static_cast<double>(N)));
        auto ci = sum.estimates["T"];
        sum.estimates["T_over_sqrtlog"] = {ci.value / s, ci.lo / s, ci.hi / s};
    }
    sum.finish_validity();
    return sum;
}

// ---------------------------------------------------------------------------
// Transport lemma check
// ---------------------------------------------------------------------------

/// Smoothed clipped random potential on a grid: u = log|f| - |z|^2/2
/// averaged over a disc of radius r_smooth, clipped to [-clip, clip].
struct PotentialGrid {
    Box window{cplx(0, 0), cplx(0, 0)};
    double spacing = 0.125;
    double r_smooth = 0.5;
    double clip = 10.0;
    long nx = 0, ny = 0;
    std::vector<double> values; // row-major over (ix, iy)

    double sup_norm() const {
        double m = 0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

inline PotentialGrid make_potential_grid(const GafSample& s, const Box& window,
                                         double spacing = 0.125, double r_smooth = 0.5,
                                         double clip = 10.0) {
    if (s.model.family != Family::Flat || s.model.intensity_L != 1.0)
        throw std::invalid_argument("potential grid is defined for flat L=1");
    PotentialGrid g;
    g.window = window;
    g.spacing = spacing;
    g.r_smooth = r_smooth;
    g.clip = clip;
    long pad = static_cast<long>(std::ceil(r_smooth / spacing));
    long nx_raw = static_cast<long>(std::floor((window.hi.real() - window.lo.real()) / spacing)) + 1;
    long ny_raw = static_cast<long>(std::floor((window.hi.imag() - window.lo.imag()) / spacing)) + 1;
    // raw u on the padded grid
    std::vector<double> raw(static_cast<std::size_t>((nx_raw + 2 * pad) * (ny_raw + 2 * pad)));
    auto raw_at = [&](long ix, long iy) -> double& {
        return raw[static_cast<std::size_t>(ix * (ny_raw + 2 * pad) + iy)];
    };
    for (long ix = 0; ix < nx_raw + 2 * pad; ++ix)
        for (long iy = 0; iy < ny_raw + 2 * pad; ++iy) {
            cplx z(window.lo.real() + spacing * static_cast<double>(ix - pad),
                   window.lo.imag() + spacing * static_cast<double>(iy - pad));
            double av = std::abs(evaluate(s, z));
            raw_at(ix, iy) = std::log(std::max(av, 1e-300)) - 0.5 * std::norm(z);
        }
    // disc-average mollifier via precomputed offsets
    std::vector<std::pair<long, long>> offs;
    for (long dx = -pad; dx <= pad; ++dx)
        for (long dy = -pad; dy <= pad; ++dy)
            if (spacing * std::hypot(static_cast<double>(dx), static_cast<double>(dy)) <=
                r_smooth)
                offs.emplace_back(dx, dy);
    g.nx = nx_raw;
    g.ny = ny_raw;
    g.values.resize(static_cast<std::size_t>(nx_raw * ny_raw));
    for (long ix = 0; ix < nx_raw; ++ix)
        for (long iy = 0; iy < ny_raw; ++iy) {
            double acc = 0;
            for (auto [dx, dy] : offs) acc += raw_at(ix + pad + dx, iy + pad + dy);
            double v = acc / static_cast<double>(offs.size());
            g.values[static_cast<std::size_t>(ix * ny_raw + iy)] =
                std::clamp(v, -clip, clip);
        }
    return g;
}

/// Numeric check of the delta-subharmonic transport inequalities for the
/// zero measure of the flat potential.  Normalization (documented): with
/// u = log|f| - |z|^2/2, Delta u = mu - m holds for mu = 2 pi x (zero
/// counting measure) and m = 2 x (Lebesgue measure); both inequalities
/// are tested with t = c sqrt(sup |u_smoothed|) for each candidate c.
inline ExperimentSummary transport_lemma_check(double halfwidth, long trials,
                                               std::uint64_t seed,
                                               std::vector<double> region_radii = {0.75, 1.5},
                                               std::vector<double> c_list = {0.25, 0.5, 0.75,
                                                                             1.0, 1.5, 2.0},
                                               int workers = default_workers()) {
    ExperimentSummary sum;
    sum.name = "lemma";
    sum.model = ModelSpec(Family::Flat, 1.0);
    sum.trials = trials;
    sum.seed = seed;
    sum.workers = workers;
    sum.params["halfwidth"] = halfwidth;
    const double pad = 0.6;
    Box zero_window{cplx(-halfwidth - pad, -halfwidth - pad),
                    cplx(halfwidth + pad, halfwidth + pad)};
    Box u_window{cplx(-halfwidth, -halfwidth), cplx(halfwidth, halfwidth)};
    ExtractionPlan plan = make_extraction_plan(sum.model, Region{zero_window});

    const std::vector<cplx> centers{cplx(0, 0), cplx(halfwidth / 4, halfwidth / 4)};
    struct CellRes {
        std::vector<char> hold; // per (c, E) pair
        bool ok = false;
    };
    const std::size_t npairs = c_list.size() * region_radii.size() * centers.size();
    std::vector<CellRes> res(static_cast<std::size_t>(trials));
    parallel_for(trials, workers, [&](long t) {
        TrialZeros tz = run_extraction(plan, seed, static_cast<std::uint64_t>(t));
        if (tz.discard) return;
        GafSample s = sample(plan.model, plan.truncation_N, seed,
                             static_cast<std::uint64_t>(t), plan.certified_radius);
        PotentialGrid g = make_potential_grid(s, u_window);
        double T = g.sup_norm();
        CellRes& r = res[static_cast<std::size_t>(t)];
        r.ok = true;
        r.hold.assign(npairs, 2); // 2 = skipped
        std::size_t idx = 0;
        for (double c : c_list)
            for (cplx e0 : centers)
                for (double rho : region_radii) {
                    double tt = c * std::sqrt(T);
                    double rout = rho + tt;
                    // the enlarged region must stay inside the zero window
                    if (std::abs(e0.real()) + rout > halfwidth + pad ||
                        std::abs(e0.imag()) + rout > halfwidth + pad) {
                        r.hold[idx++] = 2;
                        continue;
                    }
                    long nE = 0, nEt = 0;
                    for (cplx z : tz.zeros) {
                        double d = std::abs(z - e0);
                        if (d <= rho) ++nE;
                        if (d <= rout) ++nEt;
                    }
                    double mu_E = 2.0 * M_PI * static_cast<double>(nE);
                    double mu_Et = 2.0 * M_PI * static_cast<double>(nEt);
                    double m_E = 2.0 * M_PI * rho * rho;
                    double m_Et = 2.0 * M_PI * rout * rout;
                    bool ok1 = mu_E <= m_Et;  // mu(E) <= m(E_{+t})
                    bool ok2 = m_E <= mu_Et;  // m(E) <= mu(E_{+t})
                    r.hold[idx++] = (ok1 && ok2) ? 1 : 0;
                }
    });

    long used = 0;
    std::vector<long> held(c_list.size(), 0), tested(c_list.size(), 0);
    for (const auto& r : res) {
        if (!r.ok) continue;
        ++used;
        std::size_t per_c = region_radii.size() * centers.size();
        for (std::size_t ci = 0; ci < c_list.size(); ++ci)
            for (std::size_t k = 0; k < per_c; ++k) {
                char h = r.hold[ci * per_c + k];
                if (h == 2) continue;
                ++tested[ci];
                if (h == 1) ++held[ci];
            }
    }
    sum.discards = trials - used;
    Table t;
    t.columns = {"c", "fraction_held", "tested"};
    double min_c = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t ci = 0; ci < c_list.size(); ++ci) {
        double frac = tested[ci] > 0 ? static_cast<double>(held[ci]) /
                                           static_cast<double>(tested[ci])
                                     : 0.0;
        if (tested[ci] > 0 && held[ci] == tested[ci] && std::isnan(min_c))
            min_c = c_list[ci];
        t.rows.push_back({c_list[ci], frac, static_cast<double>(tested[ci])});
    }
    sum.estimates["min_c_all_hold"] = {min_c, min_c, min_c};
    sum.tables["lemma"] = std::move(t);
    sum.finish_validity();
    return sum;
}

} // namespace gafzero
