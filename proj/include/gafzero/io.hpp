#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gafzero/roots.hpp"
#include "gafzero/stats.hpp"
#include "gafzero/transport.hpp"

// Serialization: CSV tables (RFC-4180-ish, header row, stable ordering)
// and JSON summaries embedding the full run configuration, so every
// output is regenerable from one command.

namespace gafzero {

using json = nlohmann::json;

inline std::string fmt_g15(double v) {
    std::ostringstream os;
    os << std::setprecision(15) << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string command;
    json options; // flat key -> value map of everything that shaped the run

    std::string canonical() const {
        json j;
        j["command"] = command;
        j["options"] = options;
        return j.dump();
    }
    /// FNV-1a of the canonical form; identifies the configuration in
    /// summaries and filenames.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : canonical()) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }
};

inline json model_to_json(const ModelSpec& m) {
    return json{{"family", family_name(m.family)}, {"L", m.intensity_L}};
}

inline ModelSpec model_from_json(const json& j) {
    return ModelSpec(family_from_name(j.at("family").get<std::string>()),
                     j.at("L").get<double>());
}

inline json region_to_json(const Region& reg) {
    if (const auto* d = std::get_if<Disc>(&reg))
        return json{{"kind", "disc"},
                    {"center", {d->center.real(), d->center.imag()}},
                    {"radius", d->radius}};
    const auto& b = std::get<Box>(reg);
    return json{{"kind", "box"},
                {"lo", {b.lo.real(), b.lo.imag()}},
                {"hi", {b.hi.real(), b.hi.imag()}}};
}

// ---------------------------------------------------------------------------
// Samples and zero sets
// ---------------------------------------------------------------------------

inline json sample_to_json(const GafSample& s) {
    json coeffs = json::array();
    for (cplx c : s.coeffs) coeffs.push_back({c.real(), c.imag()});
    return json{{"model", model_to_json(s.model)},
                {"seed", s.seed},
                {"trial", s.trial_index},
                {"N", s.truncation_N},
                {"certified_radius", s.certified_radius},
                {"coeffs", coeffs}};
}

inline GafSample sample_from_json(const json& j) {
    std::vector<cplx> zeta;
    for (const auto& c : j.at("coeffs"))
        zeta.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    GafSample s = sample_from_coeffs(model_from_json(j.at("model")), std::move(zeta),
                                     j.at("certified_radius").get<double>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.trial_index = j.at("trial").get<std::uint64_t>();
    return s;
}

inline json zeroset_to_json(const ZeroSet& zs) {
    json zeros = json::array();
    for (std::size_t i = 0; i < zs.zeros.size(); ++i)
        zeros.push_back({zs.zeros[i].real(), zs.zeros[i].imag(), zs.residuals[i]});
    return json{{"zeros", zeros},
                {"certified_count", zs.certified_count},
                {"certificate", {{"ok", zs.certificate_ok},
                                 {"winding_total", zs.winding_total},
                                 {"region", region_to_json(zs.region)},
                                 {"dilated", zs.dilated},
                                 {"dilation_factor", zs.dilation_factor},
                                 {"diagnostic", zs.diagnostic}}}};
}

inline std::string zeroset_to_csv(const ZeroSet& zs) {
    std::ostringstream os;
    os << "re,im,residual\n";
    for (std::size_t i = 0; i < zs.zeros.size(); ++i)
        os << fmt_g15(zs.zeros[i].real()) << ',' << fmt_g15(zs.zeros[i].imag()) << ','
           << fmt_g15(zs.residuals[i]) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Experiment summaries
// ---------------------------------------------------------------------------

inline std::string table_to_csv(const Table& t) {
    std::ostringstream os;
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
    for (const auto& row : t.rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            os << fmt_g15(row[c]) << (c + 1 < row.size() ? "," : "\n");
    return os.str();
}

inline json summary_to_json(const ExperimentSummary& s, const RunConfig& cfg) {
    json est;
    for (const auto& [k, v] : s.estimates)
        est[k] = {{"value", v.value}, {"ci_lo", v.lo}, {"ci_hi", v.hi}};
    json tables;
    for (const auto& [k, t] : s.tables) {
        json rows = json::array();
        for (const auto& r : t.rows) rows.push_back(r);
        tables[k] = {{"columns", t.columns}, {"rows", rows}};
    }
    return json{{"name", s.name},
                {"model", model_to_json(s.model)},
                {"params", s.params},
                {"trials", s.trials},
                {"discards", s.discards},
                {"seed", s.seed},
                {"workers", s.workers},
                {"estimates", est},
                {"pmf", s.pmf},
                {"tables", tables},
                {"valid", s.valid},
                {"note", s.note},
                {"wall_time_s", s.wall_time_s},
                {"config", {{"command", cfg.command},
                            {"options", cfg.options},
                            {"hash", cfg.hash()}}}};
}

/// Structural validation against the published summary schema
/// (docs/summary.schema.json): required keys with the right JSON types.
inline bool summary_json_valid(const json& j, std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    const char* str_keys[] = {"name", "note"};
    for (const char* k : str_keys)
        if (!j.contains(k) || !j[k].is_string()) return fail(std::string("missing ") + k);
    const char* num_keys[] = {"trials", "discards", "seed", "workers", "wall_time_s"};
    for (const char* k : num_keys)
        if (!j.contains(k) || !j[k].is_number()) return fail(std::string("missing ") + k);
    if (!j.contains("valid") || !j["valid"].is_boolean()) return fail("missing valid");
    if (!j.contains("model") || !j["model"].is_object() || !j["model"].contains("family"))
        return fail("missing model");
    if (!j.contains("estimates") || !j["estimates"].is_object()) return fail("missing estimates");
    for (const auto& [k, v] : j["estimates"].items()) {
        (void)k;
        if (!v.is_object() || !v.contains("value")) return fail("malformed estimate");
    }
    if (!j.contains("config") || !j["config"].is_object() ||
        !j["config"].contains("command") || !j["config"].contains("options") ||
        !j["config"].contains("hash"))
        return fail("missing config");
    if (!j.contains("tables") || !j["tables"].is_object()) return fail("missing tables");
    for (const auto& [k, t] : j["tables"].items()) {
        (void)k;
        if (!t.contains("columns") || !t.contains("rows")) return fail("malformed table");
    }
    return true;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

/// Emit <name>.json plus one CSV per table into the output directory.
inline void write_summary(const std::filesystem::path& outdir, const ExperimentSummary& s,
                          const RunConfig& cfg, const std::string& stem) {
    std::filesystem::create_directories(outdir);
    write_text_file(outdir / (stem + ".json"), summary_to_json(s, cfg).dump(2) + "\n");
    for (const auto& [k, t] : s.tables)
        write_text_file(outdir / (stem + "_" + k + ".csv"), table_to_csv(t));
}

inline json comparison_to_json(const ComparisonReport& rep, const RunConfig& cfg) {
    return json{{"a", summary_to_json(rep.a, cfg)},
                {"b", summary_to_json(rep.b, cfg)},
                {"mean_diff", rep.mean_diff},
                {"joint_se", rep.joint_se},
                {"ks_two_sample", rep.ks_two_sample},
                {"tv", rep.tv}};
}

inline json matching_to_json(const MatchingResult& r) {
    json pairs = json::array();
    for (const auto& [a, b] : r.pairs)
        pairs.push_back({a.real(), a.imag(), b.real(), b.imag()});
    return json{{"algorithm", r.algorithm == MatchMode::MinCostSum ? "min_cost_sum"
                                                                   : "min_bottleneck"},
                {"pairs", pairs},
                {"total_cost", r.total_cost},
                {"mean_cost", r.mean_cost},
                {"unmatched_a", r.unmatched_a.size()},
                {"unmatched_b", r.unmatched_b.size()}};
}

inline std::string matching_to_csv(const MatchingResult& r) {
    std::ostringstream os;
    os << "a_re,a_im,b_re,b_im,disp_re,disp_im\n";
    for (std::size_t i = 0; i < r.pairs.size(); ++i) {
        const auto& [a, b] = r.pairs[i];
        cplx d = r.displacements[i];
        os << fmt_g15(a.real()) << ',' << fmt_g15(a.imag()) << ',' << fmt_g15(b.real())
           << ',' << fmt_g15(b.imag()) << ',' << fmt_g15(d.real()) << ','
           << fmt_g15(d.imag()) << '\n';
    }
    return os.str();
}

inline std::string count_law_to_csv(const CountLaw& law) {
    std::ostringstream os;
    os << "k,probability\n";
    for (std::size_t k = 0; k < law.pmf.size(); ++k)
        os << k << ',' << fmt_g15(law.pmf[k]) << '\n';
    return os.str();
}

} // namespace gafzero
