#include <gtest/gtest.h>

#include <filesystem>

#include "weedbot/config.hpp"
#include "weedbot/error.hpp"

using namespace weedbot;
using namespace weedbot::config;

namespace {

const std::filesystem::path kDefaultToml = std::filesystem::path(WEEDBOT_SOURCE_DIR) / "config" / "default.toml";

}  // namespace

TEST(Toml, ParsesSupportedSubset)
{
    const auto doc = parse_toml(R"(
top = 3   # trailing comment
name = "a \"q\" \\ b"
[x.y]
f = -1.5e2
ok = true
list = [1, 2.5,
        3]
[[arr]]
k = 1
[[arr]]
k = 2
)");
    EXPECT_EQ(doc.tables.at("").at("top").as_int(), 3);
    EXPECT_EQ(doc.tables.at("").at("name").as_string(), "a \"q\" \\ b");
    EXPECT_DOUBLE_EQ(doc.tables.at("x.y").at("f").as_double(), -150.0);
    EXPECT_TRUE(doc.tables.at("x.y").at("ok").as_bool());
    const auto& list = doc.tables.at("x.y").at("list").as_array();
    ASSERT_EQ(list.size(), 3u);
    EXPECT_DOUBLE_EQ(list[1].as_double(), 2.5);
    ASSERT_EQ(doc.table_arrays.at("arr").size(), 2u);
    EXPECT_EQ(doc.table_arrays.at("arr")[1].at("k").as_int(), 2);
}

TEST(Toml, RejectsMalformedInput)
{
    EXPECT_THROW(parse_toml("a = 1\na = 2\n"), ConfigError);
    EXPECT_THROW(parse_toml("[t]\n[t]\n"), ConfigError);
    EXPECT_THROW(parse_toml("a = 1 2\n"), ConfigError);
    EXPECT_THROW(parse_toml("a = \"open\n"), ConfigError);
    EXPECT_THROW(parse_toml("[bad name]\n"), ConfigError);
    EXPECT_THROW(parse_toml("= 3\n"), ConfigError);
    EXPECT_THROW(parse_toml("a = [1, 2\n"), ConfigError);
    try {
        parse_toml("ok = 1\n\nbroken\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Toml, TypeErrorsAreConfigErrors)
{
    const auto doc = parse_toml("s = \"x\"\n");
    EXPECT_THROW((void)doc.tables.at("").at("s").as_double(), ConfigError);
    EXPECT_THROW((void)doc.tables.at("").at("s").as_bool(), ConfigError);
}

TEST(RunConfig, DefaultFileMatchesCompiledDefaults)
{
    const RunConfig d;
    const RunConfig f = load_run_config(kDefaultToml);
    EXPECT_EQ(f.seed, d.seed);
    EXPECT_EQ(f.out, d.out);
    EXPECT_EQ(f.world.length_m, d.world.length_m);
    EXPECT_EQ(f.world.row_count, d.world.row_count);
    EXPECT_EQ(f.world.weed_density_per_m, d.world.weed_density_per_m);
    EXPECT_EQ(f.world.weed_band_half_width_m, d.world.weed_band_half_width_m);
    EXPECT_EQ(f.mission.nav.speed_cm_s, d.mission.nav.speed_cm_s);
    EXPECT_EQ(f.mission.nav.exit_distance_m, d.mission.nav.exit_distance_m);
    EXPECT_EQ(f.mission.nav.deviation_threshold_deg, d.mission.nav.deviation_threshold_deg);
    EXPECT_EQ(f.mission.down_camera.motion_blur_px_per_cmps, d.mission.down_camera.motion_blur_px_per_cmps);
    EXPECT_EQ(f.mission.front_camera.width, d.mission.front_camera.width);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(f.mission.gantry.axis(i).step_rate_hz, d.mission.gantry.axis(i).step_rate_hz) << i;
        EXPECT_EQ(f.mission.gantry.axis(i).repeatability_sigma_mm, d.mission.gantry.axis(i).repeatability_sigma_mm);
        EXPECT_EQ(f.mission.gantry.axis(i).microstepping, d.mission.gantry.axis(i).microstepping);
    }
    EXPECT_EQ(f.mission.suspension.a, d.mission.suspension.a);
    EXPECT_EQ(f.mission.calibration.mm_per_px_u, d.mission.calibration.mm_per_px_u);
    EXPECT_EQ(f.experiment.speeds, d.experiment.speeds);
    EXPECT_EQ(f.experiment.accuracy_speed_cm_s, d.experiment.accuracy_speed_cm_s);
    // Behavioural check over everything else: identical fields give identical worlds.
    const auto wd = generate_scenario(d.world, 5);
    const auto wf = generate_scenario(f.world, 5);
    ASSERT_EQ(wd.weeds.size(), wf.weeds.size());
    for (std::size_t i = 0; i < wd.weeds.size(); ++i) {
        EXPECT_EQ(wd.weeds[i].position, wf.weeds[i].position);
    }
}

TEST(RunConfig, OverridesAndUnknownKeys)
{
    RunConfig c;
    apply(parse_toml("seed = 9\n[navigation]\nspeed_cm_s = 55.0\n[camera.down]\nfootprint_u_m = 0.8\n"
                     "[[world.obstacles]]\nx_m = 1.0\ny_m = 0.2\nheight_cm = 4.0\nkind = \"organic\"\n"),
          c);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_DOUBLE_EQ(c.mission.nav.speed_cm_s, 55.0);
    EXPECT_DOUBLE_EQ(c.mission.calibration.mm_per_px_u, 1.25);
    ASSERT_EQ(c.world.obstacles.size(), 1u);
    EXPECT_EQ(c.world.obstacles[0].kind, ObstacleKind::organic);
    EXPECT_EQ(study_config(c).mission.seed, 9u);
    EXPECT_THROW(apply(parse_toml("[navigation]\nspeeed = 1\n"), c), ConfigError);
    EXPECT_THROW(apply(parse_toml("[nope]\n"), c), ConfigError);
    EXPECT_THROW(apply(parse_toml("[navigation]\nspeed_cm_s = \"fast\"\n"), c), ConfigError);
    EXPECT_THROW(apply(parse_toml("[[world.obstacles]]\nkind = \"lava\"\n"), c), std::exception);
    EXPECT_THROW(load_run_config("/nonexistent/weedbot.toml"), ConfigError);
}

TEST(NumberList, ParsesAndRejects)
{
    EXPECT_EQ(parse_number_list("30, 40,50.5"), (std::vector<double>{30.0, 40.0, 50.5}));
    EXPECT_THROW(parse_number_list(""), InvalidArgument);
    EXPECT_THROW(parse_number_list("30,,40"), InvalidArgument);
    EXPECT_THROW(parse_number_list("30x"), InvalidArgument);
}
