#include "synobs/cli.hpp"
#include "synobs/errors.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace synobs;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("synobs_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run_cli(args, out_, err_);
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    static std::vector<std::vector<std::string>> read_csv(const std::string& p) {
        std::ifstream in(p);
        std::vector<std::vector<std::string>> rows;
        std::string line;
        while (std::getline(in, line)) {
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            rows.push_back(cells);
        }
        return rows;
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

}  // namespace

TEST_F(Cli, GoldenHeader) {
    ASSERT_EQ(run({"simulate", "--t_end", "0.1", "--output", path("a.csv")}), 0) << err_.str();
    std::ifstream in(path("a.csv"));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header,
              "t,event,truth_R11,truth_R12,truth_R13,truth_R21,truth_R22,truth_R23,truth_R31,truth_R32,truth_R33,"
              "truth_v1,truth_v2,truth_v3,est_R11,est_R12,est_R13,est_R21,est_R22,est_R23,est_R31,est_R32,est_R33,"
              "est_v1,est_v2,est_v3,attitude_error_rad,velocity_error,lyapunov");
    ASSERT_EQ(run({"simulate", "--scenario", "unicycle", "--t_end", "0.1", "--output", path("u.csv")}), 0);
    std::ifstream in2(path("u.csv"));
    std::getline(in2, header);
    EXPECT_EQ(header, "t,event,truth_theta,truth_x,truth_y,est_theta,est_x,est_y,attitude_error_rad,velocity_error,lyapunov");
}

TEST_F(Cli, SimulateDefaultVaa) {
    ASSERT_EQ(run({"simulate", "--scenario", "vaa", "--output", path("vaa.csv")}), 0) << err_.str();
    const auto rows = read_csv(path("vaa.csv"));
    ASSERT_EQ(rows.size(), 1 + 1061u);
    int gnss = 0;
    int mag = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), rows[0].size());
        gnss += rows[i][1] == "1";
        mag += rows[i][1] == "2";
    }
    EXPECT_EQ(gnss, 10);
    EXPECT_EQ(mag, 50);
    EXPECT_NE(out_.str().find("events gnss: 10"), std::string::npos);
    EXPECT_NE(out_.str().find("events magnetometer: 50"), std::string::npos);
}

TEST_F(Cli, SeventeenSignificantDigits) {
    ASSERT_EQ(run({"simulate", "--t_end", "0.02", "--output", path("a.csv")}), 0);
    const auto rows = read_csv(path("a.csv"));
    const std::string cell = rows[2][2];  // truth_R11 at t = 0.01
    EXPECT_EQ(std::stod(cell), std::cos(0.01));
    EXPECT_GE(cell.size(), 14u);
}

TEST_F(Cli, NoUpdatesKeepsLyapunovConstant) {
    ASSERT_EQ(run({"simulate", "--no-updates", "--output", path("n.csv")}), 0);
    const auto rows = read_csv(path("n.csv"));
    ASSERT_EQ(rows.size(), 1 + 1001u);
    const double L0 = std::stod(rows[1].back());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][1], "0");
        EXPECT_NEAR(std::stod(rows[i].back()), L0, 1e-9);
    }
}

TEST_F(Cli, SameSeedByteIdentical) {
    ASSERT_EQ(run({"simulate", "--scenario", "vaa", "--seed", "7", "--output", path("a.csv")}), 0);
    ASSERT_EQ(run({"simulate", "--scenario", "vaa", "--seed", "7", "--output", path("b.csv")}), 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_FALSE(slurp(path("a.csv")).empty());
}

TEST_F(Cli, ConfigRoundTrip) {
    SimConfig c;
    c.scenario = "unicycle";
    c.t_end = 2.5;
    c.dt = 0.005;
    c.integrator = "euler";
    c.rate_gnss = 2.0;
    c.rate_mag = 10.0;
    c.gains = {3.0, 0.7, 2.5, 1.3};
    c.tau_gnss = 0.1;
    c.tau_mag = 0.05;
    c.flow_steps = 17;
    c.seed = 42;
    c.output = path("x.csv");
    c.no_updates = true;
    {
        std::ofstream os(path("c.ini"));
        os << to_ini(c);
    }
    const SimConfig back = parse_sim_config({"--config", path("c.ini")});
    EXPECT_TRUE(back == c);
    EXPECT_EQ(to_ini(back), to_ini(c));
    EXPECT_TRUE(parse_sim_config({}) == SimConfig{});
}

TEST_F(Cli, FlagsOverrideConfig) {
    {
        std::ofstream os(path("c.ini"));
        os << "k_v = 0.3\nt_end = 2\noutput = \"" << path("c.csv") << "\"\n";
    }
    EXPECT_EQ(run({"simulate", "--config", path("c.ini")}), 1);
    EXPECT_NE(err_.str().find("k_v"), std::string::npos);
    ASSERT_EQ(run({"simulate", "--config", path("c.ini"), "--k_v", "5"}), 0) << err_.str();
    EXPECT_EQ(read_csv(path("c.csv")).size(), 1 + 201u + 12u);
}

TEST_F(Cli, InvalidConfigNamesKey) {
    const std::vector<std::pair<std::vector<std::string>, std::string>> cases = {
        {{"simulate", "--dt", "0.03"}, "dt"},
        {{"simulate", "--dt", "-1"}, "dt"},
        {{"simulate", "--dt", "abc"}, "dt"},
        {{"simulate", "--t_end", "0"}, "t_end"},
        {{"simulate", "--rate_mag", "3"}, "rate_mag"},
        {{"simulate", "--tau_gnss", "0"}, "tau_gnss"},
        {{"simulate", "--flow_steps", "0"}, "flow_steps"},
        {{"simulate", "--integrator", "rk4"}, "integrator"},
        {{"simulate", "--scenario", "glider"}, "scenario"},
        {{"simulate", "--k_v", "0.2"}, "k_v"},
        {{"simulate", "--k_m", "-1"}, "k_m"},
        {{"simulate", "--bogus", "1"}, "bogus"},
    };
    for (const auto& [args, key] : cases) {
        std::vector<std::string> a = args;
        a.insert(a.end(), {"--output", path("z.csv")});
        EXPECT_EQ(run(a), 1) << key;
        EXPECT_NE(err_.str().find("[" + key + "]"), std::string::npos) << err_.str();
    }
    {
        std::ofstream os(path("bad.ini"));
        os << "bogus_key = 1\n";
    }
    EXPECT_EQ(run({"simulate", "--config", path("bad.ini")}), 1);
    EXPECT_NE(err_.str().find("bogus_key"), std::string::npos);
    EXPECT_EQ(run({"simulate", "--config", path("missing.ini")}), 1);
    EXPECT_EQ(run({}), 1);
    EXPECT_EQ(run({"launch"}), 1);
}

TEST_F(Cli, SimulateMonotonicityViolationExits2) {
    // one huge Euler substep overshoots the GNSS correction flow
    EXPECT_EQ(run({"simulate", "--flow_steps", "1", "--tau_gnss", "3", "--output", path("v.csv")}), 2) << out_.str();
    EXPECT_NE(out_.str().find("VIOLATED"), std::string::npos);
    EXPECT_NE(err_.str().find("warning"), std::string::npos);
}

TEST_F(Cli, AnalyzeUnicycle) {
    ASSERT_EQ(run({"analyze", "--scenario", "unicycle", "--output", path("u.json")}), 0) << err_.str();
    EXPECT_EQ(out_.str().rfind("dimension 3, matches se(2), controllable\n", 0), 0u) << out_.str();
    const nlohmann::json j = nlohmann::json::parse(slurp(path("u.json")));
    for (const char* key : {"dimension", "structure_constants", "residual", "controllable", "match"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["dimension"], 3);
    EXPECT_EQ(j["match"], "se(2)");
    EXPECT_EQ(j["controllable"], true);
    EXPECT_NEAR(j["structure_constants"][0][1][2].get<double>(), 1.0, 1e-6);
    EXPECT_NEAR(j["structure_constants"][0][2][1].get<double>(), -1.0, 1e-6);
    EXPECT_LE(j["residual"].get<double>(), 1e-8);
}

TEST_F(Cli, AnalyzeBearingsAndVaa) {
    ASSERT_EQ(run({"analyze", "--scenario", "bearings", "--output", path("b.json")}), 0);
    EXPECT_EQ(out_.str().rfind("dimension 3, matches so(3)", 0), 0u) << out_.str();
    ASSERT_EQ(run({"analyze", "--scenario", "vaa", "--output", path("v.json")}), 0);
    EXPECT_EQ(out_.str().rfind("dimension 7, no catalog match, controllable", 0), 0u) << out_.str();
}

TEST_F(Cli, AnalyzeFieldSpec) {
    {
        std::ofstream os(path("spec.json"));
        os << R"({"dimension": 2, "drift": {"constant": [1, 0]}})";
    }
    ASSERT_EQ(run({"analyze", "--spec", path("spec.json"), "--output", path("s.json")}), 0) << err_.str();
    EXPECT_EQ(out_.str().rfind("dimension 1, abelian, not controllable", 0), 0u) << out_.str();
    {
        std::ofstream os(path("bad.json"));
        os << R"({"dimension": 2, "inputs": [{"constant": [1, 0, 0]}]})";
    }
    EXPECT_EQ(run({"analyze", "--spec", path("bad.json")}), 1);
    EXPECT_NE(err_.str().find("[spec]"), std::string::npos);
    EXPECT_EQ(run({"analyze", "--scenario", "vaa", "--spec", path("spec.json")}), 1);
    EXPECT_EQ(run({"analyze"}), 1);
}

TEST_F(Cli, AnalyzeNonClosureExits3) {
    EXPECT_EQ(run({"analyze", "--scenario", "unicycle", "--max-dim", "2", "--output", path("n.json")}), 3);
    EXPECT_NE(err_.str().find("budget 2"), std::string::npos);
}

TEST_F(Cli, Verify) {
    EXPECT_EQ(run({"verify", "--scenario", "vaa"}), 0) << out_.str();
    EXPECT_NE(out_.str().find("decrease[gnss]"), std::string::npos);
    EXPECT_EQ(run({"verify", "--scenario", "bearings"}), 0) << out_.str();
    EXPECT_EQ(run({"verify", "--scenario", "unicycle"}), 0) << out_.str();
    EXPECT_EQ(run({"verify", "--scenario", "vaa", "--k_v", "0.01"}), 2);
    EXPECT_NE(out_.str().find("FAIL"), std::string::npos);
    EXPECT_NE(out_.str().find("witness"), std::string::npos);
    EXPECT_EQ(run({"verify", "--scenario", "glider"}), 1);
}

TEST_F(Cli, Help) {
    EXPECT_EQ(run({"--help"}), 0);
    EXPECT_NE(out_.str().find("simulate"), std::string::npos);
    EXPECT_EQ(run({"simulate", "--help"}), 0);
    EXPECT_NE(out_.str().find("--tau_gnss"), std::string::npos);
}
