#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gafzero/io.hpp"

// Batch command-line front end.  Every experiment writes a JSON summary
// (embedding the exact configuration that produced it) plus plot-ready
// CSV tables into the output directory.  Exit codes: 0 success, 1 runtime
// failure, 2 configuration error.

namespace gafzero {

namespace detail {

struct CliTimer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

inline ModelSpec parse_model(const std::string& family, double L) {
    return ModelSpec(family_from_name(family), L);
}

} // namespace detail

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"gafzero: Monte Carlo toolkit for zeros of Gaussian analytic functions"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key-value config file overriding defaults");

    // shared state bound into every subcommand that needs it
    std::string family = "flat";
    double L = 1.0;
    std::uint64_t seed = 1;
    long trials = 10000;
    int workers = default_workers();
    std::string outdir = "out";

    auto add_common = [&](CLI::App* sub, bool with_model = true) {
        if (with_model) {
            sub->add_option("--family", family, "model family")
                ->check(CLI::IsMember({"flat", "elliptic", "hyperbolic"}));
            sub->add_option("--L", L, "intensity parameter");
        }
        sub->add_option("--seed", seed, "base seed (GAFZERO_SEED overrides the default)")
            ->envname("GAFZERO_SEED");
        sub->add_option("--trials", trials, "Monte Carlo trials");
        sub->add_option("--workers", workers, "worker threads (estimates are unaffected)");
        sub->add_option("--out", outdir, "output directory");
    };

    // --- sample ---
    std::uint64_t trial_index = 0;
    double radius = 2.0, tol = 1e-8;
    long explicit_N = -1;
    auto* c_sample = app.add_subcommand("sample", "draw one sample and write it as JSON");
    add_common(c_sample);
    c_sample->add_option("--trial", trial_index, "trial index within the seed's stream");
    c_sample->add_option("--radius", radius, "radius the truncation must certify");
    c_sample->add_option("--tol", tol, "truncation tolerance");
    c_sample->add_option("--N", explicit_N, "explicit truncation order (overrides --radius)");

    // --- zeros ---
    std::vector<double> disc_spec;   // cx cy r
    std::vector<double> box_spec;    // x0 y0 x1 y1
    auto* c_zeros = app.add_subcommand("zeros", "extract a certified zero set");
    add_common(c_zeros);
    c_zeros->add_option("--trial", trial_index, "trial index");
    c_zeros->add_option("--disc", disc_spec, "disc region: cx cy r")->expected(3);
    c_zeros->add_option("--box", box_spec, "box region: x0 y0 x1 y1")->expected(4);

    // --- counts ---
    double rho = 0.7;
    auto* c_counts = app.add_subcommand("counts", "count statistics in a disc");
    add_common(c_counts);
    c_counts->add_option("--rho,--radius", rho, "disc radius (origin centered)");

    // --- linstat ---
    std::vector<double> r_list{8.0};
    int tf_p = 3;
    bool with_baseline = false;
    double baseline_sigma = 1.0;
    auto* c_lin = app.add_subcommand("linstat", "smooth linear statistics (flat model)");
    add_common(c_lin);
    c_lin->add_option("--r", r_list, "scaling radii (several give the variance table)");
    c_lin->add_option("--p", tf_p, "test function exponent (h = (1-|z|^2)^p)");
    c_lin->add_flag("--lattice-baseline", with_baseline,
                    "also run the perturbed-lattice comparison process");
    c_lin->add_option("--sigma", baseline_sigma, "lattice perturbation scale");

    // --- hole ---
    std::vector<double> radii{0.8, 1.0, 1.2, 1.4};
    auto* c_hole = app.add_subcommand("hole", "hole probabilities over a radius grid");
    add_common(c_hole);
    c_hole->add_option("--radii", radii, "disc radii");

    // --- largedev ---
    double ld_r = 2.0;
    std::vector<double> deltas{0.0, 0.125, 0.25, 0.5};
    auto* c_ld = app.add_subcommand("largedev", "large deviation scan (flat model)");
    add_common(c_ld);
    c_ld->add_option("--r", ld_r, "disc radius");
    c_ld->add_option("--deltas", deltas, "deviation thresholds");

    // --- paircorr ---
    double pc_radius = 0.75;
    int pc_bins = 20;
    auto* c_pc = app.add_subcommand("paircorr", "binned normalized two-point function");
    add_common(c_pc);
    c_pc->add_option("--radius", pc_radius, "sampling disc radius");
    c_pc->add_option("--bins", pc_bins, "separation bins");

    // --- offord ---
    double off_r = 2.0;
    std::vector<double> lambdas{0.5, 1.0, 2.0, 4.0};
    auto* c_off = app.add_subcommand("offord", "empirical exceedance vs the EK tail bound");
    add_common(c_off);
    c_off->add_option("--r", off_r, "test function scale");
    c_off->add_option("--p", tf_p, "test function exponent");
    c_off->add_option("--lambdas", lambdas, "exceedance levels");

    // --- invariance ---
    double inv_radius = 2.0, iso_theta = 0.0;
    std::vector<double> iso_a{0.0, 0.0};
    auto* c_inv = app.add_subcommand("invariance", "count law vs its isometry image");
    add_common(c_inv);
    c_inv->add_option("--radius", inv_radius, "base disc radius");
    c_inv->add_option("--theta", iso_theta, "isometry rotation angle");
    c_inv->add_option("--a", iso_a,
                      "isometry parameter (flat: translation; hyperbolic: alpha)")
        ->expected(2);

    // --- rigidity ---
    long rig_N = 40;
    double rig_radius = 2.0;
    auto* c_rig = app.add_subcommand("rigidity", "Haar-rotated basis count comparison");
    add_common(c_rig);
    c_rig->add_option("--N", rig_N, "truncation order");
    c_rig->add_option("--radius", rig_radius, "disc radius");

    // --- match ---
    double window = 8.0;
    std::string mode = "sum";
    std::string points_a, points_b;
    auto* c_match = app.add_subcommand("match", "lattice matching of flat zeros");
    add_common(c_match);
    c_match->add_option("--window", window, "window half-width");
    c_match->add_option("--mode", mode, "matching objective")
        ->check(CLI::IsMember({"sum", "bottleneck"}));
    c_match->add_option("--points-a", points_a, "ad-hoc mode: CSV of points (re,im)");
    c_match->add_option("--points-b", points_b, "ad-hoc mode: CSV of points (re,im)");

    // --- akt ---
    std::vector<long> akt_N{16, 32};
    auto* c_akt = app.add_subcommand("akt", "uniform-points-to-grid transport baseline");
    add_common(c_akt);
    c_akt->add_option("--N", akt_N, "grid sizes (N^2 points in [0,N]^2)");

    // --- lemma ---
    double lm_window = 8.0;
    std::vector<double> lm_radii{0.75, 1.5};
    std::vector<double> lm_c{0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    auto* c_lem = app.add_subcommand("lemma", "transport inequality check on the potential");
    add_common(c_lem);
    c_lem->add_option("--window", lm_window, "window half-width");
    c_lem->add_option("--radii", lm_radii, "test region radii");
    c_lem->add_option("--c", lm_c, "candidate constants for t = c sqrt(sup|u|)");

    // --- oracle ---
    std::vector<double> pv_points;
    std::vector<double> ek_point;
    double law_rho = -1, hole_rho = -1;
    std::vector<double> off_args;
    auto* c_or = app.add_subcommand("oracle", "print closed-form values (15 digits)");
    add_common(c_or);
    c_or->add_option("--pv", pv_points, "k-point correlation at points re im [re im ...]");
    c_or->add_option("--ek", ek_point, "intensity at a point: re im")->expected(2);
    c_or->add_option("--countlaw", law_rho, "exact count law at rho (writes CSV)");
    c_or->add_option("--hole-product", hole_rho, "exact hole probability at rho");
    c_or->add_option("--offord", off_args, "bound at lambda, |Delta phi|_1")->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    try {
        std::filesystem::path out(outdir);
        RunConfig cfg;
        cfg.options = json{{"family", family}, {"L", L},     {"seed", seed},
                           {"trials", trials}, {"workers", workers}};

        auto finalize = [&](ExperimentSummary s, const detail::CliTimer& timer,
                            const std::string& stem) {
            s.wall_time_s = timer.seconds();
            write_summary(out, s, cfg, stem);
            std::cout << stem << ": "
                      << (s.valid ? "ok" : ("INVALID (" + s.note + ")")) << ", trials "
                      << s.trials << ", discards " << s.discards << "\n";
            return s.valid ? 0 : 1;
        };

        if (app.got_subcommand(c_sample)) {
            cfg.command = "sample";
            ModelSpec m = detail::parse_model(family, L);
            long N = explicit_N;
            double cert = radius;
            if (m.family == Family::Elliptic) {
                N = static_cast<long>(L);
                cert = std::numeric_limits<double>::infinity();
            } else if (N < 0) {
                N = 2 * truncation_index(m, radius, tol);
            }
            cfg.options["trial"] = trial_index;
            cfg.options["N"] = N;
            cfg.options["radius"] = radius;
            GafSample s = sample(m, N, seed, trial_index, cert);
            std::filesystem::create_directories(out);
            json j = sample_to_json(s);
            j["config"] = {{"command", cfg.command}, {"options", cfg.options},
                           {"hash", cfg.hash()}};
            write_text_file(out / "sample.json", j.dump(2) + "\n");
            std::cout << "sample.json written (N = " << N << ")\n";
            return 0;
        }

        if (app.got_subcommand(c_zeros)) {
            cfg.command = "zeros";
            ModelSpec m = detail::parse_model(family, L);
            Region reg = Disc{0.0, 1.0};
            if (!box_spec.empty())
                reg = Box{cplx(box_spec[0], box_spec[1]), cplx(box_spec[2], box_spec[3])};
            else if (!disc_spec.empty())
                reg = Disc{cplx(disc_spec[0], disc_spec[1]), disc_spec[2]};
            else if (m.family == Family::Hyperbolic)
                reg = Disc{0.0, 0.7};
            cfg.options["trial"] = trial_index;
            cfg.options["region"] = region_to_json(reg);
            ExtractionPlan plan = make_extraction_plan(m, reg);
            GafSample s = sample(m, plan.truncation_N, seed, trial_index,
                                 plan.certified_radius);
            ZeroSet zs = m.family == Family::Elliptic ? elliptic_roots(s)
                                                      : find_zeros(s, reg);
            std::filesystem::create_directories(out);
            json j = zeroset_to_json(zs);
            j["config"] = {{"command", cfg.command}, {"options", cfg.options},
                           {"hash", cfg.hash()}};
            write_text_file(out / "zeros.json", j.dump(2) + "\n");
            write_text_file(out / "zeros.csv", zeroset_to_csv(zs));
            std::cout << "zeros: " << zs.certified_count
                      << (zs.certificate_ok ? " (certified)" : " (NOT certified)") << "\n";
            return zs.certificate_ok ? 0 : 1;
        }

        if (app.got_subcommand(c_counts)) {
            cfg.command = "counts";
            cfg.options["rho"] = rho;
            detail::CliTimer t;
            ModelSpec m = detail::parse_model(family, L);
            auto s = estimate_counts(m, Region{Disc{0.0, rho}}, trials, seed, workers);
            return finalize(std::move(s), t, "counts");
        }

        if (app.got_subcommand(c_lin)) {
            cfg.command = "linstat";
            cfg.options["r"] = r_list;
            cfg.options["p"] = tf_p;
            ModelSpec m = detail::parse_model(family, L);
            TestFunction h(tf_p);
            int rc = 0;
            detail::CliTimer t;
            if (r_list.size() == 1) {
                rc |= finalize(linear_stat_experiment(m, h, r_list[0], trials, seed, workers),
                               t, "linstat");
            } else {
                rc |= finalize(variance_scaling(m, h, r_list, trials, seed, workers), t,
                               "linstat_scaling");
            }
            if (with_baseline) {
                for (double r : r_list) {
                    detail::CliTimer t2;
                    rc |= finalize(perturbed_lattice_baseline(baseline_sigma, h, r, trials,
                                                              seed ^ 0xBADDCAFEULL, workers),
                                   t2, "lattice_baseline_r" + std::to_string(r));
                }
            }
            return rc;
        }

        if (app.got_subcommand(c_hole)) {
            cfg.command = "hole";
            cfg.options["radii"] = radii;
            detail::CliTimer t;
            ModelSpec m = detail::parse_model(family, L);
            return finalize(hole_estimate(m, radii, trials, seed, workers), t, "hole");
        }

        if (app.got_subcommand(c_ld)) {
            cfg.command = "largedev";
            cfg.options["r"] = ld_r;
            cfg.options["deltas"] = deltas;
            detail::CliTimer t;
            ModelSpec m = detail::parse_model(family, L);
            return finalize(large_dev_estimate(m, ld_r, deltas, trials, seed, workers), t,
                            "largedev");
        }

        if (app.got_subcommand(c_pc)) {
            cfg.command = "paircorr";
            cfg.options["radius"] = pc_radius;
            cfg.options["bins"] = pc_bins;
            detail::CliTimer t;
            ModelSpec m = detail::parse_model(family, L);
            return finalize(
                pair_correlation_estimate(m, pc_radius, pc_bins, trials, seed, workers), t,
                "paircorr");
        }

        if (app.got_subcommand(c_off)) {
            cfg.command = "offord";
            cfg.options["r"] = off_r;
            cfg.options["p"] = tf_p;
            cfg.options["lambdas"] = lambdas;
            detail::CliTimer t;
            ModelSpec m = detail::parse_model(family, L);
            TestFunction h(tf_p);
            return finalize(offord_check(m, h, off_r, lambdas, trials, seed, workers), t,
                            "offord");
        }

        if (app.got_subcommand(c_inv)) {
            cfg.command = "invariance";
            cfg.options["radius"] = inv_radius;
            cfg.options["theta"] = iso_theta;
            cfg.options["a"] = iso_a;
            detail::CliTimer t;
            ModelSpec m = detail::parse_model(family, L);
            IsometrySpec iso =
                m.family == Family::Flat
                    ? IsometrySpec::flat(iso_theta, cplx(iso_a[0], iso_a[1]))
                    : (m.family == Family::Hyperbolic
                           ? IsometrySpec::hyperbolic(iso_theta, cplx(iso_a[0], iso_a[1]))
                           : IsometrySpec::elliptic(std::polar(1.0, iso_theta),
                                                    cplx(iso_a[0], iso_a[1])));
            auto rep = invariance_test(m, iso, Disc{0.0, inv_radius}, trials, seed, workers);
            std::filesystem::create_directories(out);
            json j = comparison_to_json(rep, cfg);
            j["wall_time_s"] = t.seconds();
            write_text_file(out / "invariance.json", j.dump(2) + "\n");
            std::cout << "invariance: mean diff " << fmt_g15(rep.mean_diff) << " (joint SE "
                      << fmt_g15(rep.joint_se) << "), tv " << fmt_g15(rep.tv) << "\n";
            return rep.a.valid && rep.b.valid ? 0 : 1;
        }

        if (app.got_subcommand(c_rig)) {
            cfg.command = "rigidity";
            cfg.options["N"] = rig_N;
            cfg.options["radius"] = rig_radius;
            detail::CliTimer t;
            ModelSpec m = detail::parse_model(family, L);
            auto rep = rigidity_test(m, rig_N, Disc{0.0, rig_radius}, trials, seed, workers);
            std::filesystem::create_directories(out);
            json j = comparison_to_json(rep, cfg);
            j["wall_time_s"] = t.seconds();
            write_text_file(out / "rigidity.json", j.dump(2) + "\n");
            std::cout << "rigidity: mean diff " << fmt_g15(rep.mean_diff) << " (joint SE "
                      << fmt_g15(rep.joint_se) << "), tv " << fmt_g15(rep.tv) << "\n";
            return rep.a.valid && rep.b.valid ? 0 : 1;
        }

        if (app.got_subcommand(c_match)) {
            cfg.command = "match";
            MatchMode mm = mode == "sum" ? MatchMode::MinCostSum : MatchMode::MinBottleneck;
            if (!points_a.empty() || !points_b.empty()) {
                auto read_points = [](const std::string& path) {
                    std::ifstream in(path);
                    if (!in) throw std::runtime_error("cannot read " + path);
                    std::vector<cplx> pts;
                    std::string line;
                    while (std::getline(in, line)) {
                        if (line.empty() || !(std::isdigit(line[0]) || line[0] == '-'))
                            continue;
                        double re, im;
                        if (std::sscanf(line.c_str(), "%lf,%lf", &re, &im) == 2)
                            pts.emplace_back(re, im);
                    }
                    return pts;
                };
                auto A = read_points(points_a);
                auto B = read_points(points_b);
                auto r = match_points(A, B, mm);
                std::filesystem::create_directories(out);
                write_text_file(out / "match.json", matching_to_json(r).dump(2) + "\n");
                write_text_file(out / "match.csv", matching_to_csv(r));
                std::cout << "match: " << r.pairs.size() << " pairs, cost "
                          << fmt_g15(r.total_cost) << "\n";
                return 0;
            }
            cfg.options["window"] = window;
            cfg.options["mode"] = mode;
            detail::CliTimer t;
            return finalize(lattice_match_experiment(window, trials, seed, mm, workers), t,
                            "match");
        }

        if (app.got_subcommand(c_akt)) {
            cfg.command = "akt";
            cfg.options["N"] = akt_N;
            int rc = 0;
            for (long n : akt_N) {
                detail::CliTimer t;
                rc |= finalize(akt_baseline(n, trials, seed, workers), t,
                               "akt_N" + std::to_string(n));
            }
            return rc;
        }

        if (app.got_subcommand(c_lem)) {
            cfg.command = "lemma";
            cfg.options["window"] = lm_window;
            cfg.options["radii"] = lm_radii;
            cfg.options["c"] = lm_c;
            detail::CliTimer t;
            return finalize(
                transport_lemma_check(lm_window, trials, seed, lm_radii, lm_c, workers), t,
                "lemma");
        }

        if (app.got_subcommand(c_or)) {
            cfg.command = "oracle";
            ModelSpec m = detail::parse_model(family, L);
            if (!ek_point.empty())
                std::cout << "ek_intensity(" << family << ", L=" << L << ") = "
                          << fmt_g15(ek_intensity(m, cplx(ek_point[0], ek_point[1]))) << "\n";
            if (!pv_points.empty()) {
                if (pv_points.size() % 2 != 0)
                    throw std::invalid_argument("--pv needs re im pairs");
                std::vector<cplx> pts;
                for (std::size_t i = 0; i < pv_points.size(); i += 2)
                    pts.emplace_back(pv_points[i], pv_points[i + 1]);
                std::cout << "pv_correlation = " << fmt_g15(pv_correlation(pts)) << "\n";
            }
            if (law_rho > 0) {
                auto law = count_law_hyperbolic(law_rho);
                std::cout << "count law rho=" << law_rho << ": mean "
                          << fmt_g15(law.mean) << ", variance " << fmt_g15(law.variance)
                          << ", P(0) " << fmt_g15(law.pmf[0]) << "\n";
                std::filesystem::create_directories(out);
                write_text_file(out / "count_law.csv", count_law_to_csv(law));
            }
            if (hole_rho > 0)
                std::cout << "hole probability rho=" << hole_rho << ": "
                          << fmt_g15(hole_prob_hyperbolic(hole_rho)) << "\n";
            if (!off_args.empty())
                std::cout << "offord bound = "
                          << fmt_g15(offord_bound(off_args[0], off_args[1])) << "\n";
            return 0;
        }

        std::cerr << "configuration error: no subcommand\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 1;
    }
}

} // namespace gafzero
