#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "socdyn/config.hpp"

namespace fs = std::filesystem;
using namespace socdyn;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("socdyn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result run(const std::string& args) {
        const auto err_path = dir_ / "stderr.txt";
        const std::string cmd = std::string(SOCDYN_CLI_PATH) + " " + args + " 2>" + err_path.string();
        Result r;
        FILE* pipe = popen(cmd.c_str(), "r");
        if (!pipe) return r;
        char buf[4096];
        while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
        const int status = pclose(pipe);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.err = read_file(err_path);
        return r;
    }

    fs::path dir_;
};

double value_after(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string k;
    double v = NAN;
    while (in >> k) {
        if (k == key) {
            in >> v;
            return v;
        }
    }
    return v;
}

}  // namespace

TEST_F(Cli, SimulateFashionAmplitude) {
    const auto scenario = dir_ / "f.json";
    ASSERT_EQ(run("template fashion --param A0=0.75 --param k_e=4 --out " + scenario.string()).code, 0);
    const auto r = run("simulate --scenario " + scenario.string() + " --out " + (dir_ / "out").string());
    ASSERT_EQ(r.code, 0) << r.err;

    std::ifstream in(dir_ / "out" / "others.csv");
    const auto table = read_csv(in);
    const auto col = table.column_index("others.x0");
    double peak = 0.0;
    for (const auto& row : table.rows) peak = std::max(peak, std::abs(row[col]));
    EXPECT_NEAR(peak, 0.75, 1e-6 * 0.75);
}

TEST_F(Cli, AnalyzePureCosine) {
    Trajectory tr{"x", {}};
    for (int k = 0; k < 2000; ++k) {
        const double t = 0.01 * k;
        tr.samples.push_back({t, {1.5 * std::cos(2.0 * t)}, {-3.0 * std::sin(2.0 * t)}});
    }
    write_file(dir_ / "cos.csv", trajectory_csv(tr));
    for (const char* column : {"x.x0", "1"}) {
        const auto r = run("analyze --trajectory " + (dir_ / "cos.csv").string() + " --column " + column);
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_NEAR(value_after(r.out, "B"), 1.5, 1e-6);
        EXPECT_NEAR(value_after(r.out, "A"), 0.0, 1e-6);
        EXPECT_NEAR(value_after(r.out, "omega"), 2.0, 1e-6);
        EXPECT_NEAR(value_after(r.out, "frequency"), 1.0 / std::numbers::pi, 0.01 / std::numbers::pi);
    }
}

TEST_F(Cli, ValidateRejectsOutOfRangeRating) {
    auto j = to_json(build_community_demo());
    j["assessments"][0]["records"][0][3] = 150;
    write_file(dir_ / "bad.json", j.dump(2));
    const auto r = run("validate --scenario " + (dir_ / "bad.json").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("[-100, 100]"), std::string::npos) << r.err;
}

TEST_F(Cli, ValidateReportsLayersAndStability) {
    const auto path = fs::path(SOCDYN_SCENARIO_DIR) / "community.json";
    const auto r = run("validate --scenario " + path.string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("stability sustainable"), std::string::npos);
    EXPECT_NE(r.out.find("relative to town: |r| 10.007996802557443 layer ordinary_public"), std::string::npos)
        << r.out;
    EXPECT_NE(r.out.find("assessment mayor by town: [10, 5]"), std::string::npos) << r.out;
}

TEST_F(Cli, OracleReportsDeviation) {
    const auto path = fs::path(SOCDYN_SCENARIO_DIR) / "fashion.json";
    const auto r = run("oracle --scenario " + path.string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(value_after(r.out, "omega"), 1.0);
    EXPECT_LT(value_after(r.out, "max_deviation"), 1e-6);

    const auto none = run("oracle --scenario " + (fs::path(SOCDYN_SCENARIO_DIR) / "celebrity_pair.json").string());
    EXPECT_EQ(none.code, 0);
    EXPECT_NE(none.out.find("no closed-form"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run("validate --scenario " + (dir_ / "missing.json").string()).code, 3);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("template fashion --param k_e=-1").code, 1);

    // Two bodies start on top of each other with no softening.
    auto s = build_celebrity_pair(1.0, 1.0, 1.0);
    s.state.bodies[1].position = s.state.bodies[0].position;
    write_file(dir_ / "crash.json", serialize_scenario(s));
    const auto r = run("simulate --scenario " + (dir_ / "crash.json").string() + " --out " + (dir_ / "o").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("at t=0"), std::string::npos) << r.err;
}

TEST_F(Cli, WarnsWhenStepIsCoarse) {
    auto s = build_fashion_oscillator(1.0, 1.0, 1.0);
    s.integrator.dt = 0.1;
    write_file(dir_ / "coarse.json", serialize_scenario(s));
    const auto r = run("simulate --scenario " + (dir_ / "coarse.json").string() + " --out " + (dir_ / "o").string());
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("exceeds T/100"), std::string::npos) << r.err;
}

TEST_F(Cli, ParallelJobsMatchSerial) {
    std::string list;
    for (const char* name : {"fashion", "us_congress", "civil_war", "conservative_pair"}) {
        list += " " + (fs::path(SOCDYN_SCENARIO_DIR) / (std::string(name) + ".json")).string();
    }
    ASSERT_EQ(run("simulate --jobs 4 --scenario" + list + " --out " + (dir_ / "par").string()).code, 0);
    ASSERT_EQ(run("simulate --jobs 1 --scenario" + list + " --out " + (dir_ / "ser").string()).code, 0);
    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir_ / "ser")) {
        if (!entry.is_regular_file()) continue;
        const auto other = dir_ / "par" / fs::relative(entry.path(), dir_ / "ser");
        EXPECT_TRUE(read_file(entry.path()) == read_file(other)) << other;
        ++compared;
    }
    EXPECT_EQ(compared, 1u + 2u + 1u + 3u);
}

TEST_F(Cli, ShippedScenariosMatchTemplates) {
    for (const auto& entry : fs::directory_iterator(SOCDYN_SCENARIO_DIR)) {
        if (entry.path().extension() != ".json") continue;
        const auto text = read_file(entry.path());
        EXPECT_EQ(serialize_scenario(parse_scenario(text)), text) << entry.path();
    }
}
