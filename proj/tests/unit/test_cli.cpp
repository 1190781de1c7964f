#include "json.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("safeforce_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result cli(const std::string& args) const {
        const std::string cmd = std::string("'") + SAFEFORCE_CLI + "' " + args + " > '" + (dir_ / "stdout").string() +
                                "' 2> '" + (dir_ / "stderr").string() + "'";
        const int status = std::system(cmd.c_str());
        Result r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(dir_ / "stdout");
        r.err = slurp(dir_ / "stderr");
        return r;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, RunPresetPasses) {
    const auto out = dir_ / "exp1";
    const Result r = cli("run --preset exp1 --out '" + out.string() + "'");
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_NE(r.out.find("exp1-above: PASS"), std::string::npos);
    EXPECT_TRUE(fs::exists(out / "trajectory.csv"));
    EXPECT_NE(slurp(out / "audit.txt").find("result: PASS"), std::string::npos);
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["preset"], "exp1");
    EXPECT_EQ(manifest["scenario"]["name"], "exp1-above");
    EXPECT_FALSE(fs::exists(out / "barrier.svg"));
}

TEST_F(Cli, RecoveryPresetWithDiagram) {
    const auto out = dir_ / "exp2";
    const Result r = cli("run --preset exp2 --emit-svg --emit-qp-dumps --seed 7 --out '" + out.string() + "'");
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    const std::string svg = slurp(out / "barrier.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    std::ifstream dumps(out / "qp_dumps.jsonl");
    std::string first;
    std::getline(dumps, first);
    EXPECT_TRUE(nlohmann::json::parse(first).contains("H"));
    EXPECT_EQ(nlohmann::json::parse(slurp(out / "manifest.json"))["seed"], 7);
}

TEST_F(Cli, MalformedScenarioNamesTheField) {
    nlohmann::json j = {{"robot", {{"plane_rpy_deg", {0, -90, 0}}}},
                        {"F_d", -3},
                        {"Z_d_star", -0.025},
                        {"q0", {{"z", 0.5}, {"q_m", {10, 10}}}},
                        {"limits", {{"preset", "baseline"}, {"K_L", "fast"}}}};
    std::ofstream(dir_ / "bad.json") << j.dump();
    const Result r = cli("run --scenario '" + (dir_ / "bad.json").string() + "' --out '" + (dir_ / "o").string() + "'");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("limits.K_L"), std::string::npos) << r.err;

    std::ofstream(dir_ / "syntax.json") << "{\n\"F_d\": -3,,\n}";
    const Result s = cli("run --scenario '" + (dir_ / "syntax.json").string() + "'");
    EXPECT_EQ(s.code, 2);
    EXPECT_NE(s.err.find("line 2"), std::string::npos) << s.err;
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(cli("run").code, 2);
    EXPECT_EQ(cli("run --preset exp1 --scenario x.json").code, 2);
    EXPECT_EQ(cli("run --preset nope").code, 2);
    EXPECT_EQ(cli("fly").code, 2);
    EXPECT_EQ(cli("sweep --preset exp1").code, 2);
    EXPECT_EQ(cli("sweep --preset exp1 --grid /F_d=").code, 2);
}

TEST_F(Cli, SweepWritesSummary) {
    const auto out = dir_ / "sw";
    const Result r = cli("sweep --preset exp4 --grid /F_d=-1,-4 --grid /duration=5 --workers 2 --out '" +
                         out.string() + "'");
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    std::ifstream csv(out / "summary.csv");
    std::string header, row0, row1;
    std::getline(csv, header);
    std::getline(csv, row0);
    std::getline(csv, row1);
    EXPECT_EQ(header, "run,/F_d,/duration,dt,terminal_force_error,terminal_A,alignment_bound,min_B,audit_pass,error");
    EXPECT_EQ(row0.rfind("0,-1,5,", 0), 0u) << row0;
    EXPECT_EQ(row1.rfind("1,-4,5,", 0), 0u) << row1;
    EXPECT_NE(row1.find(",true,"), std::string::npos);
    EXPECT_TRUE(fs::exists(out / "run_1" / "audit.txt"));
}

TEST_F(Cli, PresetsDump) {
    const Result r = cli("presets --dump '" + (dir_ / "scen").string() + "'");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(fs::exists(dir_ / "scen" / "exp3-inclined.json"));
    const auto out = dir_ / "again";
    const Result again =
        cli("run --scenario '" + (dir_ / "scen" / "exp3-inclined.json").string() + "' --out '" + out.string() + "'");
    EXPECT_EQ(again.code, 0) << again.err;
}

TEST_F(Cli, ShippedScenariosParse) {
    for (const auto& e : fs::directory_iterator(fs::path(SAFEFORCE_SOURCE_DIR) / "scenarios")) {
        if (e.path().extension() != ".json") continue;
        const auto out = dir_ / e.path().stem();
        const Result r = cli("run --scenario '" + e.path().string() + "' --dt 0.05 --out '" + out.string() + "'");
        EXPECT_NE(r.code, 2) << e.path() << r.err;
    }
}
