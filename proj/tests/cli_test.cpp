#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "padyn/gibbs.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(PADYN_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

nlohmann::json run_json(const std::string& args) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 0) << args;
    return nlohmann::json::parse(r.out);
}

TEST(Cli, NormOfThreeQuarters) {
    const auto j = run_json("norm --p 2 --value 3/4");
    EXPECT_EQ(j["norm"]["exponent"], -2);
    EXPECT_EQ(j["norm"]["rendered"], "4");
    EXPECT_EQ(j["padic"]["valuation"], -2);
}

TEST(Cli, PrecisionFromEnvironment) {
    const auto r = run("norm --p 5 --value 1/3", "PADYN_PRECISION=12");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["padic"]["precision"], 12);
    EXPECT_EQ(j["padic"]["digits"].size(), 12u);
    // An explicit flag wins.
    const auto k = nlohmann::json::parse(run("norm --p 5 --value 1/3 --precision 7", "PADYN_PRECISION=12").out);
    EXPECT_EQ(k["padic"]["precision"], 7);
}

TEST(Cli, FixpointsIncludeOneAttractive) {
    const auto j = run_json("fixpoints --map ising --p 7 --k 2 --rho 6/1 --N 1");
    bool found = false;
    for (const auto& f : j["fixed_points"]) {
        const auto& d = f["point"]["digits"];
        bool is_one = f["point"]["valuation"] == 0 && d[0] == 1;
        for (std::size_t i = 1; i < d.size(); ++i) is_one = is_one && d[i] == 0;
        if (is_one) {
            found = true;
            EXPECT_EQ(f["class"], "attractive");
        }
    }
    EXPECT_TRUE(found);
}

TEST(Cli, CensusAgreesWithLibrary) {
    const auto j = run_json("census --p 5 --k 2 --rho 1/5 --N 1");
    const auto c = padyn::ti_census_ising(padyn::ModelParams::ising(5, 2, mpq_class(1, 5), 1));
    EXPECT_EQ(j["count"], c.count());
    EXPECT_EQ(j["measures"].size(), c.count());
    EXPECT_EQ(j["verdict"], c.verdict());
    EXPECT_EQ(j["theorem"]["expected_count"], 4);
    EXPECT_EQ(j["theorem"]["count_matches"], c.theorem->count_matches);
}

TEST(Cli, LambdaCensus) {
    const auto j = run_json("census --p 5 --k 2 --rho 6 --lambda 2,0,1,0");
    EXPECT_EQ(j["regime"], "ep");
    EXPECT_EQ(j["count"], 3);
    EXPECT_EQ(j["phase_transition"], true);
}

TEST(Cli, SubshiftFullShift) {
    const auto j = run_json("subshift --p 5 --k 2 --rho 6 --N 1");
    EXPECT_EQ(j["balls"].size(), 2u);
    EXPECT_EQ(j["incidence"], nlohmann::json::parse("[[1,1],[1,1]]"));
    ASSERT_EQ(j["conjugacy"]["rows"].size(), 3u);
    for (const auto& row : j["conjugacy"]["rows"]) EXPECT_EQ(row["trace"], row["points_in_X"]);
    EXPECT_EQ(j["conjugacy"]["holds"], true);
}

TEST(Cli, CompatibilityWitness) {
    const auto ok = run_json("compat --p 5 --k 2 --rho 6 --N 1 --n 3 --field periodic --m 3");
    ASSERT_EQ(ok["fields"].size(), 2u);
    for (const auto& f : ok["fields"]) EXPECT_EQ(f["holds"], true);
    const auto bad = run_json("compat --p 5 --k 2 --rho 6 --N 1 --n 2 --h 6");
    ASSERT_EQ(bad["fields"].size(), 1u);
    EXPECT_EQ(bad["fields"][0]["holds"], false);
    EXPECT_EQ(bad["fields"][0]["witness"].size(), 3u);
}

TEST(Cli, BoundedCsvProfile) {
    const auto r = run("bounded --p 5 --k 2 --rho 2 --N 1 --format csv");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "measure,n,valuation_of_measure_norm");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, static_cast<int>(padyn::kProfileDepth));
}

TEST(Cli, PeriodicCycles) {
    const auto j = run_json("periodic --p 5 --k 2 --rho 6 --N 1 --m 3");
    // Three fixed points and two 3-cycles.
    EXPECT_EQ(j["count"], 9);
    EXPECT_EQ(j["cycles"].size(), 2u);
}

TEST(Cli, OrbitConverges) {
    const auto j = run_json("orbit --p 5 --k 2 --rho 6 --N 1 --x0 6");
    EXPECT_EQ(j["stop_reason"], "converged");
}

TEST(Cli, RootsReport) {
    const auto j = run_json("roots --p 13 --k 2");
    EXPECT_EQ(j["roots_mod_p"], nlohmann::json::parse("[5, 8]"));
    const auto r = run_json("roots --p 7 --poly -2,0,1");
    EXPECT_EQ(r["roots"].size(), 2u);
}

TEST(Cli, DeterministicAndFileOutput) {
    const std::string args = "subshift --p 5 --k 2 --rho 6 --N 1 --seed 9 --samples 16";
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const std::string path = ::testing::TempDir() + "padyn_cli_out.json";
    ASSERT_EQ(run(args + " --out " + path).code, 0);
    std::ifstream f(path, std::ios::binary);
    std::stringstream content;
    content << f.rdbuf();
    EXPECT_EQ(content.str(), a.out);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("census --p 5 --k 2 --rho abc --N 1").code, 2);
    EXPECT_EQ(run("census --p 5 --k 2 --rho 1/0 --N 1").code, 2);
    EXPECT_EQ(run("census --p 4 --k 2 --rho 2 --N 1").code, 2);
    EXPECT_EQ(run("census --p 5 --k 2 --rho 2 --N 1 --format xml").code, 2);
    EXPECT_EQ(run("subshift --p 7 --k 2 --rho 8 --N 1").code, 3);
    // a_{-1}(h) = rho + h / rho vanishes at h = -rho^2.
    EXPECT_EQ(run("bounded --p 5 --k 2 --rho 2 --N 1 --h -4").code, 4);
    EXPECT_EQ(run("compat --p 5 --k 3 --rho 6 --N 1 --n 2 --h -1").code, 4);
    EXPECT_EQ(run("compat --p 5 --k 4 --rho 6 --N 1 --n 2").code, 6);
    EXPECT_EQ(run("bounded --p 5 --k 3 --rho 6 --N 1 --h -1").code, 14);
}

} // namespace
