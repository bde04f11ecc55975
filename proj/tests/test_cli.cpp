#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "gafzero/cli.hpp"

using namespace gafzero;

namespace {

int run(std::vector<std::string> args) {
    std::vector<const char*> argv{"gafzero"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path outdir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("gafzero_cli_" + tag);
    std::filesystem::remove_all(p);
    return p;
}

json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

} // namespace

TEST_CASE("configuration errors exit with code 2") {
    CHECK(run({}) != 0);
    CHECK(run({"counts", "--family", "nosuch"}) == 2);
    CHECK(run({"counts", "--family", "elliptic", "--L", "2.5", "--trials", "5"}) == 2);
    CHECK(run({"counts", "--family", "hyperbolic", "--rho", "1.5", "--trials", "5"}) == 2);
    CHECK(run({"linstat", "--family", "hyperbolic", "--r", "0.5", "--trials", "5"}) == 2);
}

TEST_CASE("counts subcommand writes summary and pmf") {
    auto dir = outdir("counts");
    int rc = run({"counts", "--family", "hyperbolic", "--L", "1", "--rho", "0.5",
                  "--trials", "300", "--seed", "7", "--out", dir.string()});
    CHECK(rc == 0);
    json j = read_json(dir / "counts.json");
    std::string why;
    CHECK(summary_json_valid(j, &why));
    CHECK(j["config"]["command"] == "counts");
    CHECK(j["config"]["options"]["rho"].get<double>() == 0.5);
    CHECK(std::filesystem::exists(dir / "counts_pmf.csv"));
}

TEST_CASE("estimates are identical across worker counts") {
    auto d1 = outdir("w1"), d2 = outdir("w2");
    REQUIRE(run({"counts", "--family", "flat", "--L", "1", "--rho", "1.5", "--trials",
                 "200", "--seed", "11", "--workers", "1", "--out", d1.string()}) == 0);
    REQUIRE(run({"counts", "--family", "flat", "--L", "1", "--rho", "1.5", "--trials",
                 "200", "--seed", "11", "--workers", "2", "--out", d2.string()}) == 0);
    json a = read_json(d1 / "counts.json"), b = read_json(d2 / "counts.json");
    CHECK(a["estimates"] == b["estimates"]);
    CHECK(a["pmf"] == b["pmf"]);
    CHECK(a["discards"] == b["discards"]);
    // wall time may differ; estimates may not
}

TEST_CASE("oracle subcommand prints closed forms") {
    auto dir = outdir("oracle");
    CHECK(run({"oracle", "--pv", "0", "0", "0.5", "0", "--out", dir.string()}) == 0);
    CHECK(run({"oracle", "--hole-product", "0.5", "--out", dir.string()}) == 0);
    CHECK(run({"oracle", "--countlaw", "0.5", "--out", dir.string()}) == 0);
    CHECK(std::filesystem::exists(dir / "count_law.csv"));
    CHECK(run({"oracle", "--offord", "1.0", "1.0"}) == 0);
    CHECK(run({"oracle", "--ek", "0", "0", "--family", "hyperbolic", "--L", "1"}) == 0);
}

TEST_CASE("sample and zeros round trip through files") {
    auto dir = outdir("sz");
    REQUIRE(run({"sample", "--family", "flat", "--L", "1", "--seed", "3", "--trial", "4",
                 "--radius", "1.5", "--out", dir.string()}) == 0);
    json js = read_json(dir / "sample.json");
    auto s = sample_from_json(js);
    CHECK(s.truncation_N == js["N"].get<long>());

    REQUIRE(run({"zeros", "--family", "flat", "--L", "1", "--seed", "3", "--trial", "4",
                 "--disc", "0", "0", "1.5", "--out", dir.string()}) == 0);
    json jz = read_json(dir / "zeros.json");
    CHECK(jz["certificate"]["ok"].get<bool>());
    CHECK(std::filesystem::exists(dir / "zeros.csv"));
}

TEST_CASE("match subcommand on ad-hoc point files") {
    auto dir = outdir("match");
    std::filesystem::create_directories(dir);
    {
        std::ofstream a(dir / "a.csv"), b(dir / "b.csv");
        a << "re,im\n0,0\n1,0\n";
        b << "re,im\n0.1,0\n1.2,0\n5,5\n";
    }
    REQUIRE(run({"match", "--points-a", (dir / "a.csv").string(), "--points-b",
                 (dir / "b.csv").string(), "--out", dir.string()}) == 0);
    json j = read_json(dir / "match.json");
    CHECK(j["pairs"].size() == 2);
    CHECK(j["total_cost"].get<double>() == Catch::Approx(0.3));
}

TEST_CASE("config file feeds defaults") {
    auto dir = outdir("cfg");
    std::filesystem::create_directories(dir);
    auto cfgpath = dir / "run.ini";
    {
        std::ofstream cfg(cfgpath);
        cfg << "[counts]\nfamily=hyperbolic\nL=1\nrho=0.4\ntrials=100\nseed=9\nout=" +
                   dir.string() + "\n";
    }
    REQUIRE(run({"--config", cfgpath.string(), "counts"}) == 0);
    json j = read_json(dir / "counts.json");
    CHECK(j["config"]["options"]["rho"].get<double>() == 0.4);
    CHECK(j["trials"].get<long>() == 100);
}

TEST_CASE("GAFZERO_SEED environment variable sets the default seed") {
    auto dir = outdir("env");
    setenv("GAFZERO_SEED", "12345", 1);
    REQUIRE(run({"counts", "--family", "flat", "--rho", "1.0", "--trials", "50", "--out",
                 dir.string()}) == 0);
    unsetenv("GAFZERO_SEED");
    json j = read_json(dir / "counts.json");
    CHECK(j["seed"].get<std::uint64_t>() == 12345);
}
