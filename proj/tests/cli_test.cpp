#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "weedbot/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code{0};
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = weedbot::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string config_path()
{
    return (fs::path(WEEDBOT_SOURCE_DIR) / "config" / "default.toml").string();
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("weedbot_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"fly"}).code, 2);
    EXPECT_EQ(run({"kinematics", "report", "--bogus"}).code, 2);
    const auto r = run({"gantry", "plan"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--to"), std::string::npos);
    EXPECT_EQ(run({"sweep", "--trials", "0"}).code, 2);
}

TEST(Cli, HelpSucceeds)
{
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("sweep"), std::string::npos);
    EXPECT_EQ(run({"accuracy", "--help"}).code, 0);
}

TEST(Cli, KinematicsReport)
{
    const auto r = run({"kinematics", "report"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("path,theta3_deg,d_m_mm,max_lift_mm,max_obstacle_cm\r\n", 0), 0u);
    EXPECT_NE(r.out.find("formula,-10.80"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("reference,"), std::string::npos);
}

TEST(Cli, GantryPlan)
{
    const auto r = run({"gantry", "plan", "--to", "10,20,5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("x,"), std::string::npos);
    EXPECT_NE(r.out.find("duration_s,"), std::string::npos);
    EXPECT_EQ(run({"gantry", "plan", "--to", "1,2"}).code, 1);
    EXPECT_EQ(run({"gantry", "plan", "--to", "1e9,0,0"}).code, 1);
}

TEST(Cli, ConfigThenScenarioThenFlags)
{
    const auto dir = scratch("precedence");
    const auto scenario = dir / "scenario.toml";
    {
        std::ofstream f(scenario);
        f << "[world]\nlength_m = 1.5\nrow_count = 1\nweed_density_per_m = 4.0\n"
             "[navigation]\nspeed_cm_s = 35.0\n";
    }
    const auto from_file = run({"mission", "run", "--config", config_path(), "--scenario", scenario.string()});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_NE(from_file.out.find("speed_cm_s,35.000"), std::string::npos) << from_file.out;
    const auto flag = run({"mission", "run", "--config", config_path(), "--scenario", scenario.string(), "--speed",
                           "60", "--log", (dir / "log.csv").string()});
    ASSERT_EQ(flag.code, 0) << flag.err;
    EXPECT_NE(flag.out.find("speed_cm_s,60.000"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "log.csv"));
    EXPECT_EQ(run({"mission", "run", "--config", (dir / "missing.toml").string()}).code, 2);
    {
        std::ofstream f(dir / "bad.toml");
        f << "[navigation]\nnot_a_key = 1\n";
    }
    const auto bad = run({"mission", "run", "--config", (dir / "bad.toml").string()});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("not_a_key"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, RenderThenVision)
{
    const auto dir = scratch("render");
    const auto img = (dir / "front.ppm").string();
    const auto r = run({"render", "--camera", "front", "--x", "1.0", "--y", "0.3", "--out", img});
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_TRUE(fs::exists(img));
    const auto rows = run({"vision", "run", "--in", img, "--stage", "rows"});
    ASSERT_EQ(rows.code, 0) << rows.err;
    EXPECT_EQ(rows.out.rfind("index,angle_deg,offset_px,votes\r\n0,", 0), 0u) << rows.out;
    const auto mask = (dir / "mask.pgm").string();
    EXPECT_EQ(run({"vision", "run", "--in", img, "--stage", "mask", "--out", mask}).code, 0);
    EXPECT_TRUE(fs::exists(mask));
    EXPECT_EQ(run({"vision", "run", "--in", img, "--stage", "nope"}).code, 2);
    fs::remove_all(dir);
}

TEST(Cli, MissionDumpsFrames)
{
    const auto dir = scratch("frames");
    const auto scenario = dir / "s.toml";
    {
        std::ofstream f(scenario);
        f << "[world]\nlength_m = 1.5\nrow_count = 1\nweed_density_per_m = 0.0\n[navigation]\nspeed_cm_s = 70.0\n";
    }
    const auto r = run({"mission", "run", "--scenario", scenario.string(), "--dump-frames", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "frames" / "down_00000.ppm"));
    EXPECT_TRUE(fs::exists(dir / "frames" / "front_00000.ppm"));
    fs::remove_all(dir);
}
