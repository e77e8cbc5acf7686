#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mgseir/mgseir.hpp"

using namespace mgseir;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
};

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("mgseir_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CliRun cli(const std::string& args) {
    const fs::path log = fs::temp_directory_path() / "mgseir_cli_stdout.txt";
    const std::string cmd = std::string(MGSEIR_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(log)};
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream(p) << s;
}

const char* kQuick = " --intervals 3 --population 12 --generations 10 --no-polish";

}  // namespace

TEST(Cli, CatalogListsScenarios) {
    const CliRun r = cli("catalog");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("baseline\n"), std::string::npos);
    EXPECT_NE(r.out.find("treatment_50\n"), std::string::npos);
}

TEST(Cli, CalibrateBetaPrintsJson) {
    const CliRun r = cli("calibrate-beta");
    ASSERT_EQ(r.code, 0) << r.out;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["beta"].get<double>(), germany_baseline().beta, 1e-15);
    EXPECT_NEAR(j["r0"].get<double>(), 2.4, 1e-9);
    EXPECT_EQ(j["ngm"].size(), 3u);
}

TEST(Cli, SimulateDiseaseFreeGivesFlatUninfectedShares) {
    const fs::path dir = scratch("flat");
    write_text(dir / "cfg.json", R"({"initial_exposed_share": 0})");
    const CliRun r = cli("simulate --config " + (dir / "cfg.json").string() + " --dt 1 --out " + (dir / "out").string());
    ASSERT_EQ(r.code, 0) << r.out;
    for (const char* f : {"trajectory.csv", "summary.json", "policy.json", "uninfected.svg", "rt.svg", "policy.svg",
                          "manifest.json"})
        EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    const ModelParams p = germany_baseline();
    std::stringstream ss(read_file(dir / "out" / "trajectory.csv"));
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        std::stringstream ls(line);
        std::vector<double> v;
        std::string cell;
        while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
        if (v[0] >= p.horizon) break;  // terminal row moves S into R
        EXPECT_EQ(v[1], p.groups[0].population_share);
        EXPECT_EQ(v[6], p.groups[1].population_share);
        EXPECT_EQ(v[11], p.groups[2].population_share);
    }
}

TEST(Cli, SimulateInitialRtMatchesCalibrationModule) {
    const fs::path dir = scratch("rt");
    const CliRun r = cli("simulate --no-svg --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const json s = json::parse(read_file(dir / "summary.json"));
    const ModelParams p = germany_baseline();
    EXPECT_EQ(s["rt_initial"].get<double>(), s["effective_rt_t0"].get<double>());
    EXPECT_NEAR(s["effective_rt_t0"].get<double>(), effective_rt(initial_state(p), Levels{}, p), 1e-15);
    EXPECT_FALSE(fs::exists(dir / "rt.svg"));
}

TEST(Cli, ReplayReproducesCsvBytes) {
    const fs::path dir = scratch("replay");
    ASSERT_EQ(cli("simulate --scenario testing_0.7+wfh_v1 --out " + (dir / "a").string()).code, 0);
    const CliRun r = cli("replay --manifest " + (dir / "a" / "manifest.json").string() + " --out " + (dir / "b").string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(read_file(dir / "a" / "trajectory.csv"), read_file(dir / "b" / "trajectory.csv"));

    ASSERT_EQ(cli("frontier --chi 40000 --out " + (dir / "c").string() + kQuick).code, 0);
    ASSERT_EQ(cli("replay --manifest " + (dir / "c" / "manifest.json").string() + " --out " + (dir / "d").string()).code,
              0);
    EXPECT_EQ(read_file(dir / "c" / "frontier.csv"), read_file(dir / "d" / "frontier.csv"));
}

TEST(Cli, SimulateWithPolicyFile) {
    const fs::path dir = scratch("policy");
    write_text(dir / "policy.json", R"({"family":"semi","horizon":546,"intervals":2,"levels":[[0.2,0.1],[0.9,0.5]]})");
    const CliRun r = cli("simulate --policy " + (dir / "policy.json").string() + " --out " + (dir / "out").string());
    ASSERT_EQ(r.code, 0) << r.out;
    const PolicySchedule back = policy_from_json(json::parse(read_file(dir / "out" / "policy.json")));
    EXPECT_EQ(back.levels, (std::vector<double>{0.2, 0.1, 0.9, 0.5}));
}

TEST(Cli, SingleChiFrontierHasOneRow) {
    const fs::path dir = scratch("frontier1");
    const CliRun r = cli("frontier --chi 40000 --family uniform,semi --out " + dir.string() + kQuick);
    ASSERT_EQ(r.code, 0) << r.out;
    for (const char* f : {"frontier_uniform.csv", "frontier_semi.csv", "frontier.svg", "manifest.json"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    std::stringstream ss(read_file(dir / "frontier_uniform.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(ss, line)) ++rows;
    EXPECT_EQ(rows, 1);
}

TEST(Cli, CompareIdenticalScenariosGiveIdenticalRows) {
    const fs::path dir = scratch("compare");
    const CliRun r = cli("compare --scenario baseline,baseline --chi 30000 --out " + dir.string() + kQuick);
    ASSERT_EQ(r.code, 0) << r.out;
    std::stringstream ss(read_file(dir / "compare.csv"));
    std::string header, a, b;
    std::getline(ss, header);
    std::getline(ss, a);
    std::getline(ss, b);
    EXPECT_EQ(header, "scenario,chi,mortality,econ_loss,econ_loss_pct_gdp,max_icu,senior_shielding_days");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b);
}

TEST(Cli, ExitCodes) {
    const fs::path dir = scratch("codes");
    write_text(dir / "bad.json", R"({"groups": {"young": {"salary": 1}}})");
    write_text(dir / "broken.json", "{not json");
    EXPECT_EQ(cli("simulate --config " + (dir / "bad.json").string() + " --out " + dir.string()).code, 2);
    EXPECT_EQ(cli("simulate --config " + (dir / "broken.json").string() + " --out " + dir.string()).code, 2);
    EXPECT_EQ(cli("simulate --scenario no_such_thing --out " + dir.string()).code, 2);
    EXPECT_EQ(cli("simulate --dt 0.33 --out " + dir.string()).code, 2);
    EXPECT_EQ(cli("simulate --family everyone --out " + dir.string()).code, 2);
    EXPECT_EQ(cli("frontier --chi 1 --chi-grid 3 --out " + dir.string()).code, 2);
    EXPECT_EQ(cli("optimize --safety-cap 1e-7 --out " + dir.string() + kQuick).code, 4);
    EXPECT_EQ(cli("simulate --config " + (dir / "missing.json").string()).code, 5);
    write_text(dir / "file", "x");
    EXPECT_EQ(cli("simulate --out " + (dir / "file" / "sub").string()).code, 5);
}

TEST(Cli, IntegrationFailureExitCode) {
    const fs::path dir = scratch("integration");
    write_text(dir / "cfg.json", R"({"beta": 50, "initial_exposed_share": 0.05})");
    const CliRun r = cli("simulate --config " + (dir / "cfg.json").string() + " --dt 273 --out " + dir.string());
    EXPECT_EQ(r.code, 3) << r.out;
}
