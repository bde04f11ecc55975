#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gafzero/model.hpp"
#include "gafzero/oracle.hpp"
#include "gafzero/parallel.hpp"
#include "gafzero/region.hpp"
#include "gafzero/roots.hpp"
#include "gafzero/statutil.hpp"
#include "gafzero/testfunc.hpp"

// Monte Carlo experiment harness.  Every estimator derives its randomness
// from (seed, trial) only and aggregates per-trial slots in trial order,
// so results are bit-identical for any worker count.  Trials whose zero
// extraction needed a boundary dilation or failed certification are
// discarded and counted; a discard rate of 1% or more marks the
// experiment invalid.

namespace gafzero {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ExperimentSummary {
    std::string name;
    ModelSpec model;
    std::map<std::string, double> params;
    long trials = 0;
    long discards = 0;
    std::uint64_t seed = 0;
    int workers = 1;
    std::map<std::string, CiValue> estimates;
    std::vector<double> pmf; // empirical count pmf where applicable
    std::map<std::string, Table> tables;
    double wall_time_s = 0;
    bool valid = true;
    std::string note;

    double discard_rate() const {
        return trials > 0 ? static_cast<double>(discards) / static_cast<double>(trials) : 0.0;
    }
    void finish_validity() {
        if (discard_rate() >= 0.01) {
            valid = false;
            note = "discard rate >= 1%";
        }
    }
};

// ---------------------------------------------------------------------------
// Shared extraction plumbing
// ---------------------------------------------------------------------------

/// Tail variance ratio of an N-term truncation at `radius` stays below
/// tol^2?  (Same certificate as truncation_index, for a fixed N.)
inline bool truncation_certifies(const ModelSpec& m, long N, double radius, double tol) {
    if (m.family == Family::Elliptic) return N >= static_cast<long>(m.intensity_L);
    long need = truncation_index(m, radius, tol);
    return N >= need;
}

inline void require_trials(long trials) {
    if (trials <= 0) throw std::invalid_argument("trials must be positive");
}

struct ExtractionPlan {
    ModelSpec model;
    Region region{Disc{0.0, 0.0}};
    long truncation_N = 0;
    double certified_radius = 0;
    ZeroFindOptions opt;
};

/// Truncation policy: certify the tiling's reach at tol = 1e-8, then
/// double the order (zero locations are more truncation-sensitive than
/// values near near-zeros).
inline ExtractionPlan make_extraction_plan(const ModelSpec& m, const Region& region,
                                           double tol = 1e-8,
                                           const ZeroFindOptions& opt = {}) {
    ExtractionPlan p;
    p.model = m;
    p.region = region;
    p.opt = opt;
    if (m.family == Family::Elliptic) {
        p.truncation_N = static_cast<long>(m.intensity_L);
        p.certified_radius = std::numeric_limits<double>::infinity();
        return p;
    }
    double R = required_radius(m, region);
    if (m.family == Family::Hyperbolic && R > 0.99)
        throw std::domain_error("region needs truncation beyond the 0.99 working radius");
    p.certified_radius = R;
    p.truncation_N = 2 * truncation_index(m, R, tol);
    return p;
}

struct TrialZeros {
    std::vector<cplx> zeros;
    long count = 0;
    bool ok = false;
    bool discard = true;
};

inline TrialZeros run_extraction(const ExtractionPlan& p, std::uint64_t seed,
                                 std::uint64_t trial) {
    TrialZeros out;
    GafSample s = sample(p.model, p.truncation_N, seed, trial, p.certified_radius);
    ZeroSet zs = p.model.family == Family::Elliptic ? elliptic_roots(s, p.opt)
                                                    : find_zeros(s, p.region, p.opt);
    if (!zs.certificate_ok || zs.dilated) return out;
    out.ok = true;
    out.discard = false;
    if (p.model.family == Family::Elliptic) {
        for (cplx z : zs.zeros)
            if (contains(p.region, z)) out.zeros.push_back(z);
    } else {
        out.zeros = std::move(zs.zeros);
    }
    out.count = static_cast<long>(out.zeros.size());
    return out;
}

// ---------------------------------------------------------------------------
// Counting statistics
// ---------------------------------------------------------------------------

inline ExperimentSummary estimate_counts(const ModelSpec& m, const Region& region,
                                         long trials, std::uint64_t seed,
                                         int workers = default_workers()) {
    ExperimentSummary sum;
    sum.name = "counts";
    sum.model = m;
    sum.trials = trials;
    sum.seed = seed;
    sum.workers = workers;
    sum.params["area"] = area(region);
    if (const auto* d = std::get_if<Disc>(&region)) {
        sum.params["radius"] = d->radius;
        sum.params["center_re"] = d->center.real();
        sum.params["center_im"] = d->center.imag();
    }
    ExtractionPlan plan = make_extraction_plan(m, region);
    sum.params["truncation_N"] = static_cast<double>(plan.truncation_N);

    std::vector<long> counts(static_cast<std::size_t>(trials), -1);
    parallel_for(trials, workers, [&](long t) {
        TrialZeros tz = run_extraction(plan, seed, static_cast<std::uint64_t>(t));
        counts[static_cast<std::size_t>(t)] = tz.discard ? -1 : tz.count;
    });

    std::vector<long> kept;
    kept.reserve(counts.size());
    for (long c : counts)
        if (c >= 0) kept.push_back(c);
    sum.discards = trials - static_cast<long>(kept.size());

    std::vector<double> vals(kept.begin(), kept.end());
    sum.estimates["mean_count"] = mean_ci(vals);
    double var = sample_variance(vals);
    double n = static_cast<double>(vals.size());
    // moment-based CI for the variance
    double m2 = 0, m4 = 0, mean = sample_mean(vals);
    for (double x : vals) {
        double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    double se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    sum.estimates["var_count"] = {var, var - kZ95 * se_var, var + kZ95 * se_var};
    long holes = 0;
    for (long c : kept)
        if (c == 0) ++holes;
    sum.estimates["hole_freq"] = wilson_ci(holes, static_cast<long>(kept.size()));
    sum.pmf = empirical_pmf(kept);

    Table pmf_table;
    pmf_table.columns = {"k", "probability"};
    // exact law column for origin-centered hyperbolic discs
    const auto* d = std::get_if<Disc>(&region);
    bool oracle_pmf = m.family == Family::Hyperbolic && m.intensity_L == 1.0 && d &&
                      std::abs(d->center) < 1e-12;
    CountLaw law;
    if (oracle_pmf) {
        law = count_law_hyperbolic(d->radius);
        pmf_table.columns.push_back("oracle_probability");
        sum.estimates["oracle_mean"] = {law.mean, law.mean, law.mean};
        sum.estimates["tv_vs_oracle"] = {tv_distance(sum.pmf, law.pmf), 0, 0};
    }
    std::size_t rows = std::max(sum.pmf.size(), oracle_pmf ? law.pmf.size() : 0);
    for (std::size_t k = 0; k < rows; ++k) {
        std::vector<double> row{static_cast<double>(k),
                                k < sum.pmf.size() ? sum.pmf[k] : 0.0};
        if (oracle_pmf) row.push_back(k < law.pmf.size() ? law.pmf[k] : 0.0);
        pmf_table.rows.push_back(std::move(row));
    }
    sum.tables["pmf"] = std::move(pmf_table);
    sum.finish_validity();
    return sum;
}

// ---------------------------------------------------------------------------
// Smooth linear statistics
// ---------------------------------------------------------------------------

/// Z_r(h) = sum over zeros of h(z/r) for the flat model, centered by the
/// analytic mean r^2/pi * int h dm.
inline ExperimentSummary linear_stat_experiment(const ModelSpec& m, const TestFunction& h,
                                                double r, long trials, std::uint64_t seed,
                                                int workers = default_workers()) {
    if (m.family != Family::Flat)
        throw std::invalid_argument("linear statistics are defined for the flat model");
    ExperimentSummary sum;
    sum.name = "linstat";
    sum.model = m;
    sum.trials = trials;
    sum.seed = seed;
    sum.workers = workers;
    sum.params["r"] = r;
    sum.params["p"] = h.p;
    ExtractionPlan plan = make_extraction_plan(m, Disc{0.0, r});
    sum.params["truncation_N"] = static_cast<double>(plan.truncation_N);

    std::vector<double> z(static_cast<std::size_t>(trials));
    std::vector<char> bad(static_cast<std::size_t>(trials), 0);
    parallel_for(trials, workers, [&](long t) {
        TrialZeros tz = run_extraction(plan, seed, static_cast<std::uint64_t>(t));
        if (tz.discard) {
            bad[static_cast<std::size_t>(t)] = 1;
            return;
        }
        double acc = 0;
        for (cplx zz : tz.zeros) acc += h(zz / r);
        z[static_cast<std::size_t>(t)] = acc;
    });

    std::vector<double> vals;
    vals.reserve(z.size());
    for (long t = 0; t < trials; ++t)
        if (!bad[static_cast<std::size_t>(t)]) vals.push_back(z[static_cast<std::size_t>(t)]);
    sum.discards = trials - static_cast<long>(vals.size());

    const double center = m.intensity_L * r * r * h.integral() / M_PI;
    sum.estimates["analytic_center"] = {center, center, center};
    sum.estimates["mean_Z"] = mean_ci(vals);
    double var = sample_variance(vals);
    double n = static_cast<double>(vals.size());
    double mean = sample_mean(vals), m2 = 0, m4 = 0;
    for (double x : vals) {
        double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    double se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    sum.estimates["var_Z"] = {var, var - kZ95 * se_var, var + kZ95 * se_var};
    double lap2 = h.laplacian_l2_sq();
    sum.estimates["kappa_hat"] = {var * r * r / lap2, (var - kZ95 * se_var) * r * r / lap2,
                                  (var + kZ95 * se_var) * r * r / lap2};

    std::vector<double> normalized;
    normalized.reserve(vals.size());
    double sd = std::sqrt(var);
    for (double x : vals) normalized.push_back((x - center) / sd);
    sum.estimates["ks_normal"] = {ks_distance_normal(normalized), 0, 0};

    Table tt;
    tt.columns = {"normalized_Z"};
    for (double x : normalized) tt.rows.push_back({x});
    sum.tables["normalized"] = std::move(tt);
    sum.finish_validity();
    return sum;
}

/// Batch of linear-statistic runs over a radius list; the stabilizing
/// sequence Var Z_r * r^2 / |Delta h|_2^2 estimates the variance constant.
inline ExperimentSummary variance_scaling(const ModelSpec& m, const TestFunction& h,
                                          const std::vector<double>& r_list, long trials,
                                          std::uint64_t seed,
                                          int workers = default_workers()) {
    ExperimentSummary sum;
    sum.name = "variance_scaling";
    sum.model = m;
    sum.trials = trials;
    sum.seed = seed;
    sum.workers = workers;
    sum.params["p"] = h.p;
    Table t;
    t.columns = {"r", "kappa_hat", "ci_lo", "ci_hi", "var_Z", "ks_normal"};
    long discards = 0;
    for (std::size_t i = 0; i < r_list.size(); ++i) {
        auto one = linear_stat_experiment(m, h, r_list[i], trials,
                                          seed + 1000003ULL * i, workers);
        discards += one.discards;
        auto k = one.estimates.at("kappa_hat");
        t.rows.push_back({r_list[i], k.value, k.lo, k.hi, one.estimates.at("var_Z").value,
                          one.estimates.at("ks_normal").value});
    }
    sum.discards = discards;
    sum.trials = trials * static_cast<long>(r_list.size());
    sum.tables["scaling"] = std::move(t);
    sum.finish_validity();
    return sum;
}

/// i.i.d. Gaussian-perturbed lattice sqrt(pi) Z^2 + sigma eta, the
/// comparison point process: its smooth linear statistics have variance
/// of order |grad h|_2^2, not decaying in r.
inline ExperimentSummary perturbed_lattice_baseline(double sigma, const TestFunction& h,
                                                    double r, long trials,
                                                    std::uint64_t seed,
                                                    int workers = default_workers()) {
    if (sigma < 0) throw std::invalid_argument("sigma must be >= 0");
    ExperimentSummary sum;
    sum.name = "perturbed_lattice";
    sum.model = ModelSpec(Family::Flat, 1.0, "lattice-baseline");
    sum.trials = trials;
    sum.seed = seed;
    sum.workers = workers;
    sum.params["sigma"] = sigma;
    sum.params["r"] = r;
    sum.params["p"] = h.p;

    const double spacing = std::sqrt(M_PI);
    const double reach = r + sigma * 8.0 + spacing;
    const long kmax = static_cast<long>(std::ceil(reach / spacing));
    std::vector<double> z(static_cast<std::size_t>(trials));
    parallel_for(trials, workers, [&](long t) {
        double acc = 0;
        std::uint64_t idx = 0;
        for (long k = -kmax; k <= kmax; ++k)
            for (long l = -kmax; l <= kmax; ++l) {
                cplx base(spacing * static_cast<double>(k), spacing * static_cast<double>(l));
                cplx pt = base;
                if (sigma > 0)
                    pt += sigma * complex_gaussian(seed, static_cast<std::uint64_t>(t), idx,
                                                   rng_substream::aux);
                ++idx;
                if (std::abs(pt) <= r) acc += h(pt / r);
            }
        z[static_cast<std::size_t>(t)] = acc;
    });

    sum.estimates["mean_S"] = mean_ci(z);
    double var = sample_variance(z);
    double n = static_cast<double>(z.size());
    double mean = sample_mean(z), m2 = 0, m4 = 0;
    for (double x : z) {
        double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    double se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    sum.estimates["var_S"] = {var, var - kZ95 * se_var, var + kZ95 * se_var};
    double g2 = h.gradient_l2_sq();
    sum.estimates["var_over_grad2"] = {var / g2, (var - kZ95 * se_var) / g2,
                                       (var + kZ95 * se_var) / g2};
    sum.finish_validity();
    return sum;
}

// ---------------------------------------------------------------------------
// Hole probabilities and large deviations
// ---------------------------------------------------------------------------

/// Monte Carlo hole frequencies; counting is winding-only (no zero
/// locations needed for the event n = 0).
inline ExperimentSummary hole_estimate(const ModelSpec& m, const std::vector<double>& radii,
                                       long trials, std::uint64_t seed,
                                       int workers = default_workers()) {
    ExperimentSummary sum;
    sum.name = "hole";
    sum.model = m;
    sum.trials = trials * static_cast<long>(radii.size());
    sum.seed = seed;
    sum.workers = workers;
    Table t;
    bool oracle = m.family == Family::Hyperbolic && m.intensity_L == 1.0;
    t.columns = {"radius", "hole_freq", "wilson_lo", "wilson_hi", "neglog_over_r4",
                 "discards"};
    if (oracle) t.columns.push_back("oracle");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        double r = radii[i];
        Region reg = Disc{0.0, r};
        long N = m.family == Family::Elliptic
                     ? static_cast<long>(m.intensity_L)
                     : 2 * truncation_index(m, r * 1.0015, 1e-8);
        double cert = r * 1.0015;
        std::uint64_t rseed = seed + 7919ULL * i;
        std::vector<int> res(static_cast<std::size_t>(trials), -1);
        parallel_for(trials, workers, [&](long tr) {
            GafSample s = sample(m, N, rseed, static_cast<std::uint64_t>(tr), cert);
            if (m.family == Family::Elliptic) {
                ZeroSet zs = elliptic_roots(s);
                if (!zs.certificate_ok) return;
                long c = 0;
                for (cplx z : zs.zeros)
                    if (std::abs(z) <= r) ++c;
                res[static_cast<std::size_t>(tr)] = c == 0 ? 1 : 0;
                return;
            }
            auto w = winding_count(s, reg);
            if (!w.ok || w.dilated) return;
            res[static_cast<std::size_t>(tr)] = w.count == 0 ? 1 : 0;
        });
        long holes = 0, used = 0;
        for (int v : res)
            if (v >= 0) {
                ++used;
                holes += v;
            }
        sum.discards += trials - used;
        CiValue ci = wilson_ci(holes, used);
        double neglog = holes > 0 ? -std::log(ci.value) / (r * r * r * r)
                                  : std::numeric_limits<double>::quiet_NaN();
        std::vector<double> row{r, ci.value, ci.lo, ci.hi, neglog,
                                static_cast<double>(trials - used)};
        if (oracle) row.push_back(hole_prob_hyperbolic(r));
        t.rows.push_back(std::move(row));
    }
    sum.tables["hole"] = std::move(t);
    sum.finish_validity();
    return sum;
}

inline ExperimentSummary large_dev_estimate(const ModelSpec& m, double r,
                                            const std::vector<double>& deltas, long trials,
                                            std::uint64_t seed,
                                            int workers = default_workers()) {
    if (m.family != Family::Flat)
        throw std::invalid_argument("large deviation scan is defined for the flat model");
    ExperimentSummary sum;
    sum.name = "largedev";
    sum.model = m;
    sum.trials = trials;
    sum.seed = seed;
    sum.workers = workers;
    sum.params["r"] = r;
    long N = 2 * truncation_index(m, r * 1.0015, 1e-8);
    std::vector<long> counts(static_cast<std::size_t>(trials), -1);
    parallel_for(trials, workers, [&](long tr) {
        GafSample s = sample(m, N, seed, static_cast<std::uint64_t>(tr), r * 1.0015);
        auto w = winding_count(s, Disc{0.0, r});
        if (w.ok && !w.dilated) counts[static_cast<std::size_t>(tr)] = w.count;
    });
    long used = 0;
    for (long c : counts)
        if (c >= 0) ++used;
    sum.discards = trials - used;
    Table t;
    t.columns = {"delta", "probability", "wilson_lo", "wilson_hi", "events"};
    for (double d : deltas) {
        long ev = 0;
        for (long c : counts) {
            if (c < 0) continue;
            if (std::abs(static_cast<double>(c) / (r * r) - 1.0) >= d) ++ev;
        }
        CiValue ci = wilson_ci(ev, used);
        t.rows.push_back({d, ci.value, ci.lo, ci.hi, static_cast<double>(ev)});
    }
    sum.tables["largedev"] = std::move(t);
    sum.finish_validity();
    return sum;
}

// ---------------------------------------------------------------------------
// Pair correlation
// ---------------------------------------------------------------------------

/// Binned normalized two-point function.  The numerator counts same-trial
/// ordered pairs; the denominator uses cross pairs between consecutive
/// kept trials (independent samples with identical geometry), which
/// cancels all region and binning factors.  For hyperbolic runs the bins
/// live in the pseudo-hyperbolic distance and the bin-averaged
/// Peres-Virag determinant rides along as the oracle column.
inline ExperimentSummary pair_correlation_estimate(const ModelSpec& m, double region_radius,
                                                   int bins, long trials,
                                                   std::uint64_t seed,
                                                   int workers = default_workers()) {
    ExperimentSummary sum;
    sum.name = "paircorr";
    sum.model = m;
    sum.trials = trials;
    sum.seed = seed;
    sum.workers = workers;
    sum.params["region_radius"] = region_radius;
    sum.params["bins"] = bins;
    Region reg = Disc{0.0, region_radius};
    ExtractionPlan plan = make_extraction_plan(m, reg);

    std::vector<std::vector<cplx>> zeros(static_cast<std::size_t>(trials));
    std::vector<char> bad(static_cast<std::size_t>(trials), 0);
    parallel_for(trials, workers, [&](long t) {
        TrialZeros tz = run_extraction(plan, seed, static_cast<std::uint64_t>(t));
        if (tz.discard)
            bad[static_cast<std::size_t>(t)] = 1;
        else
            zeros[static_cast<std::size_t>(t)] = std::move(tz.zeros);
    });

    const bool hyper = m.family == Family::Hyperbolic;
    auto dist = [&](cplx a, cplx b) {
        if (hyper) return std::abs((a - b) / (1.0 - std::conj(a) * b));
        return std::abs(a - b);
    };
    const double dmax = hyper ? 2.0 * region_radius / (1.0 + region_radius * region_radius)
                              : 2.0 * region_radius;
    const double width = dmax / bins;
    const bool pv_oracle = hyper && m.intensity_L == 1.0;

    std::vector<double> same(static_cast<std::size_t>(bins), 0.0);
    std::vector<double> cross(static_cast<std::size_t>(bins), 0.0);
    std::vector<double> oracle_sum(static_cast<std::size_t>(bins), 0.0);
    long used = 0;
    const std::vector<cplx>* prev = nullptr;
    for (long t = 0; t < trials; ++t) {
        if (bad[static_cast<std::size_t>(t)]) continue;
        const auto& cur = zeros[static_cast<std::size_t>(t)];
        ++used;
        for (std::size_t i = 0; i < cur.size(); ++i)
            for (std::size_t j = 0; j < cur.size(); ++j) {
                if (i == j) continue;
                int b = static_cast<int>(dist(cur[i], cur[j]) / width);
                if (b >= 0 && b < bins) same[static_cast<std::size_t>(b)] += 1.0;
            }
        if (prev) {
            for (cplx a : cur)
                for (cplx b2 : *prev) {
                    int b = static_cast<int>(dist(a, b2) / width);
                    if (b < 0 || b >= bins) continue;
                    cross[static_cast<std::size_t>(b)] += 1.0;
                    if (pv_oracle) {
                        double g = pv_correlation({a, b2}) /
                                   (ek_intensity(m, a) * ek_intensity(m, b2));
                        oracle_sum[static_cast<std::size_t>(b)] += g;
                    }
                }
        }
        prev = &cur;
    }
    sum.discards = trials - used;

    Table t;
    t.columns = {"d_lo", "d_hi", "g_hat", "pairs_same", "pairs_cross", "underfilled"};
    if (pv_oracle) t.columns.push_back("g_oracle");
    // both counters estimate ordered-pair measures: the same-trial loop
    // runs over ordered (i, j), and the cross loop ranges a and b
    // independently, so (z, w) and (w, z) configurations both occur
    double pair_norm = used > 1 ? static_cast<double>(used) / (used - 1.0) : 1.0;
    for (int b = 0; b < bins; ++b) {
        double s_cnt = same[static_cast<std::size_t>(b)];
        double c_cnt = cross[static_cast<std::size_t>(b)];
        double ghat = c_cnt > 0 ? s_cnt / (c_cnt * pair_norm) : 0.0;
        std::vector<double> row{b * width, (b + 1) * width, ghat, s_cnt, c_cnt,
                                (s_cnt < 50 || c_cnt < 25) ? 1.0 : 0.0};
        if (pv_oracle)
            row.push_back(c_cnt > 0 ? oracle_sum[static_cast<std::size_t>(b)] / c_cnt : 0.0);
        t.rows.push_back(std::move(row));
    }
    sum.tables["paircorr"] = std::move(t);
    sum.finish_validity();
    return sum;
}

// ---------------------------------------------------------------------------
// Offord bound check
// ---------------------------------------------------------------------------

inline double expected_linear_stat(const ModelSpec& m, const TestFunction& h, double r) {
    if (m.family == Family::Flat) return m.intensity_L * r * r * h.integral() / M_PI;
    // radial quadrature of h(t/r) against the intensity
    auto f = [&](double t) {
        return 2.0 * M_PI * t * h(cplx(t / r, 0)) * ek_intensity(m, cplx(t, 0));
    };
    return integrate(f, 0.0, r, 1e-12);
}

inline ExperimentSummary offord_check(const ModelSpec& m, const TestFunction& h, double r,
                                      const std::vector<double>& lambdas, long trials,
                                      std::uint64_t seed, int workers = default_workers()) {
    if (m.family == Family::Hyperbolic && r >= 1.0)
        throw std::invalid_argument("support radius must stay inside the unit disc");
    ExperimentSummary sum;
    sum.name = "offord";
    sum.model = m;
    sum.trials = trials;
    sum.seed = seed;
    sum.workers = workers;
    sum.params["r"] = r;
    sum.params["p"] = h.p;
    const double l1 = h.laplacian_l1(); // scale-invariant in the plane
    sum.params["laplacian_l1"] = l1;
    const double center = expected_linear_stat(m, h, r);
    sum.params["expected"] = center;

    ExtractionPlan plan = make_extraction_plan(m, Disc{0.0, r});
    std::vector<double> x(static_cast<std::size_t>(trials));
    std::vector<char> bad(static_cast<std::size_t>(trials), 0);
    parallel_for(trials, workers, [&](long t) {
        TrialZeros tz = run_extraction(plan, seed, static_cast<std::uint64_t>(t));
        if (tz.discard) {
            bad[static_cast<std::size_t>(t)] = 1;
            return;
        }
        double acc = 0;
        for (cplx z : tz.zeros) acc += h(z / r);
        x[static_cast<std::size_t>(t)] = acc - center;
    });
    std::vector<double> vals;
    for (long t = 0; t < trials; ++t)
        if (!bad[static_cast<std::size_t>(t)]) vals.push_back(x[static_cast<std::size_t>(t)]);
    sum.discards = trials - static_cast<long>(vals.size());

    Table t;
    t.columns = {"lambda", "exceed_freq", "wilson_lo", "wilson_hi", "bound", "violation"};
    for (double lam : lambdas) {
        long ev = 0;
        for (double v : vals)
            if (std::abs(v) > lam) ++ev;
        CiValue ci = wilson_ci(ev, static_cast<long>(vals.size()));
        double bound = offord_bound(lam, l1);
        double se = 0.5 * (ci.hi - ci.lo) / kZ95;
        double viol = ci.value > bound + 3.0 * se ? 1.0 : 0.0;
        t.rows.push_back({lam, ci.value, ci.lo, ci.hi, bound, viol});
    }
    sum.tables["offord"] = std::move(t);
    sum.finish_validity();
    return sum;
}

// ---------------------------------------------------------------------------
// Invariance and rigidity
// ---------------------------------------------------------------------------

struct ComparisonReport {
    ExperimentSummary a, b;
    double mean_diff = 0;
    double joint_se = 0;
    double ks_two_sample = 0;
    double tv = 0;
};

inline std::vector<double> counts_from_pmf(const ExperimentSummary& s) {
    // reconstruct the sorted count sample from the pmf for the KS distance
    std::vector<double> out;
    long kept = s.trials - s.discards;
    for (std::size_t k = 0; k < s.pmf.size(); ++k) {
        long c = std::lround(s.pmf[k] * static_cast<double>(kept));
        for (long i = 0; i < c; ++i) out.push_back(static_cast<double>(k));
    }
    return out;
}

inline ComparisonReport compare_count_summaries(const ExperimentSummary& a,
                                                const ExperimentSummary& b) {
    ComparisonReport r;
    r.a = a;
    r.b = b;
    const CiValue& ma = a.estimates.at("mean_count");
    const CiValue& mb = b.estimates.at("mean_count");
    r.mean_diff = ma.value - mb.value;
    double sea = ma.half_width() / kZ95, seb = mb.half_width() / kZ95;
    r.joint_se = std::sqrt(sea * sea + seb * seb);
    r.tv = tv_distance(a.pmf, b.pmf);
    r.ks_two_sample = ks_distance_two_sample(counts_from_pmf(a), counts_from_pmf(b));
    return r;
}

/// Gamma-stationarity check: count statistics in a region against its
/// image under an isometry, with independent seeds.
inline ComparisonReport invariance_test(const ModelSpec& m, const IsometrySpec& iso,
                                        const Disc& disc, long trials, std::uint64_t seed,
                                        int workers = default_workers()) {
    if (m.family != iso.family)
        throw std::invalid_argument("isometry family must match the model");
    Disc image = isometry_image_disc(iso, disc);
    auto a = estimate_counts(m, Region{disc}, trials, seed, workers);
    auto b = estimate_counts(m, Region{image}, trials, seed ^ 0x517cc1b727220a95ULL, workers);
    a.name = "invariance_base";
    b.name = "invariance_image";
    return compare_count_summaries(a, b);
}

/// Haar-distributed unitary from the (seed, aux) stream: QR of a complex
/// Ginibre matrix with the R diagonal forced positive.
inline std::vector<std::vector<cplx>> haar_unitary(long n, std::uint64_t seed) {
    std::vector<std::vector<cplx>> g(static_cast<std::size_t>(n),
                                     std::vector<cplx>(static_cast<std::size_t>(n)));
    for (long j = 0; j < n; ++j)
        for (long k = 0; k < n; ++k)
            g[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = complex_gaussian(
                seed, 0xC0FFEEULL + static_cast<std::uint64_t>(j),
                static_cast<std::uint64_t>(k), rng_substream::aux);
    // modified Gram-Schmidt on columns
    for (long c = 0; c < n; ++c) {
        for (long prev = 0; prev < c; ++prev) {
            cplx dot = 0;
            for (long r = 0; r < n; ++r)
                dot += std::conj(g[static_cast<std::size_t>(r)][static_cast<std::size_t>(prev)]) *
                       g[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            for (long r = 0; r < n; ++r)
                g[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    dot * g[static_cast<std::size_t>(r)][static_cast<std::size_t>(prev)];
        }
        double nrm = 0;
        for (long r = 0; r < n; ++r)
            nrm += std::norm(g[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        nrm = std::sqrt(nrm);
        for (long r = 0; r < n; ++r)
            g[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] /= nrm;
    }
    return g;
}

/// Calabi-rigidity comparison: a Haar rotation of the truncated basis
/// leaves the covariance (hence the zero law) unchanged; the count
/// distributions of the two ensembles must agree.
inline ComparisonReport rigidity_test(const ModelSpec& m, long N, const Disc& disc,
                                      long trials, std::uint64_t seed,
                                      int workers = default_workers()) {
    if (m.family != Family::Flat)
        throw std::invalid_argument("rigidity test is set up for the flat model");
    double R = required_radius(m, Region{disc});
    if (!truncation_certifies(m, N, R, 1e-8))
        throw std::invalid_argument("region too close to the truncation radius for this N");

    auto U = haar_unitary(N + 1, seed ^ 0xABCDEF12345ULL);
    auto a = estimate_counts(m, Region{disc}, trials, seed, workers);
    a.name = "rigidity_base";

    // rotated ensemble: coefficients c = U^T zeta
    ExperimentSummary b;
    b.name = "rigidity_rotated";
    b.model = m;
    b.trials = trials;
    b.seed = seed ^ 0x9E3779B97F4A7C15ULL;
    b.workers = workers;
    ZeroFindOptions opt;
    std::vector<long> counts(static_cast<std::size_t>(trials), -1);
    std::uint64_t bseed = b.seed;
    parallel_for(trials, workers, [&](long t) {
        std::vector<cplx> zeta(static_cast<std::size_t>(N) + 1);
        for (long k = 0; k <= N; ++k)
            zeta[static_cast<std::size_t>(k)] =
                complex_gaussian(bseed, static_cast<std::uint64_t>(t),
                                 static_cast<std::uint64_t>(k));
        std::vector<cplx> rot(static_cast<std::size_t>(N) + 1, 0.0);
        for (long k = 0; k <= N; ++k) {
            cplx acc = 0;
            for (long j = 0; j <= N; ++j)
                acc += U[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] *
                       zeta[static_cast<std::size_t>(j)];
            rot[static_cast<std::size_t>(k)] = acc;
        }
        GafSample s = sample_from_coeffs(m, std::move(rot), R);
        s.seed = bseed;
        s.trial_index = static_cast<std::uint64_t>(t);
        ZeroSet zs = find_zeros(s, Region{disc}, opt);
        if (zs.certificate_ok && !zs.dilated)
            counts[static_cast<std::size_t>(t)] = zs.certified_count;
    });
    std::vector<long> kept;
    for (long c : counts)
        if (c >= 0) kept.push_back(c);
    b.discards = trials - static_cast<long>(kept.size());
    std::vector<double> vals(kept.begin(), kept.end());
    b.estimates["mean_count"] = mean_ci(vals);
    b.pmf = empirical_pmf(kept);
    b.finish_validity();
    return compare_count_summaries(a, b);
}

} // namespace gafzero
