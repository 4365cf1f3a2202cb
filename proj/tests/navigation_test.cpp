#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "weedbot/error.hpp"
#include "weedbot/navigation.hpp"
#include "weedbot/vision/render.hpp"

using namespace weedbot;

namespace {

FieldScenario field(int rows, double length, double density)
{
    ScenarioSpec spec;
    spec.row_count = rows;
    spec.length_m = length;
    spec.weed_density_per_m = density;
    return generate_scenario(spec, 1);
}

RobotState run_commands(RobotState s, const std::vector<MotionCommand>& cmds, const NavConfig& cfg)
{
    for (const auto& c : cmds) {
        s = apply_command(s, c, cfg);
    }
    return s;
}

}  // namespace

TEST(Modes, TransitionTable)
{
    using M = NavMode;
    EXPECT_TRUE(transition_allowed(M::aligning, M::following));
    EXPECT_TRUE(transition_allowed(M::following, M::exiting));
    EXPECT_TRUE(transition_allowed(M::exiting, M::turning));
    EXPECT_TRUE(transition_allowed(M::turning, M::aligning));
    EXPECT_TRUE(transition_allowed(M::following, M::done));
    EXPECT_FALSE(transition_allowed(M::following, M::aligning));
    EXPECT_FALSE(transition_allowed(M::done, M::aligning));
    EXPECT_FALSE(transition_allowed(M::done, M::done));
    EXPECT_STREQ(to_string(M::turning), "turning");
}

TEST(FollowStep, ThresholdIsStrict)
{
    NavConfig cfg;
    NavState st;
    st.mode = NavMode::following;
    vision::DetectedRow row;
    row.angle_deg = 5.0;
    auto cmd = follow_step(st, row, cfg);
    EXPECT_EQ(cmd, MotionCommand::advance(cfg.speed_cm_s / 100.0 * cfg.frame_period_s));
    EXPECT_DOUBLE_EQ(st.heading_error_deg, -5.0);
    row.angle_deg = -7.5;
    cmd = follow_step(st, row, cfg);
    EXPECT_EQ(cmd, MotionCommand::turn(-7.5));
    NavState wrong;
    EXPECT_THROW(follow_step(wrong, row, cfg), InvalidArgument);
}

TEST(FollowStep, ClosedLoopRemovesTwentyDegreesWithinThreeCycles)
{
    const auto world = field(1, 6.0, 0.0);
    const auto cam = vision::CameraModel::front();
    NavConfig cfg;
    for (double initial : {20.0, -20.0}) {
        RobotState s;
        s.position = {0.8, 0.3};
        s.heading_rad = deg_to_rad(initial);
        NavState st;
        st.mode = NavMode::following;
        int cycles = 0;
        double err = initial;
        while (std::abs(err) >= 5.0 && cycles < 3) {
            const auto img = vision::render_view(world, s, cam, static_cast<std::uint64_t>(cycles + 1));
            const auto row = vision::select_row(vision::detect_rows(img));
            ASSERT_TRUE(row.has_value());
            s = apply_command(s, follow_step(st, *row, cfg), cfg);
            err = rad_to_deg(s.heading_rad);
            ++cycles;
        }
        EXPECT_LT(std::abs(err), 5.0) << initial;
        EXPECT_LE(cycles, 3);
    }
}

TEST(Align, CommandsFromImageRow)
{
    const auto row = vision::make_line(0.0, 8.0, 200, 125);
    const auto cmd = align_to_row(row, 8.0);
    EXPECT_DOUBLE_EQ(cmd.turn_deg, 0.0);
    EXPECT_DOUBLE_EQ(cmd.lateral_mm, 64.0);
    const auto seq = cmd.to_commands();
    ASSERT_EQ(seq.size(), 3u);
    EXPECT_EQ(seq[0], MotionCommand::turn(-90.0));
    EXPECT_EQ(seq[1], MotionCommand::advance(0.064));
    EXPECT_EQ(seq[2], MotionCommand::turn(90.0));
    EXPECT_TRUE(AlignCommand{}.is_noop());
    EXPECT_TRUE(AlignCommand{}.to_commands().empty());
    EXPECT_THROW(align_to_row(row, 0.0), InvalidArgument);
}

TEST(Align, RowInBodyPutsRobotOnTheLine)
{
    const auto world = field(1, 6.0, 0.0);
    const auto cam = vision::CameraModel::front();
    NavConfig cfg;
    for (double heading : {-10.0, 0.0, 6.0}) {
        for (double offset : {-0.05, 0.03}) {
            RobotState s;
            s.position = {1.0, 0.3 + offset};
            s.heading_rad = deg_to_rad(heading);
            const auto row = vision::select_row(vision::detect_rows(vision::render_view(world, s, cam, 3)));
            ASSERT_TRUE(row.has_value());
            const auto est = row_in_body(*row, cam);
            EXPECT_NEAR(est.angle_deg, -heading, 0.5);
            const auto after = run_commands(s, align_to_row(est).to_commands(), cfg);
            EXPECT_NEAR(rad_to_deg(after.heading_rad), 0.0, 0.5) << heading << ' ' << offset;
            EXPECT_NEAR(after.position.y, 0.3, 0.01) << heading << ' ' << offset;
        }
    }
}

TEST(Maneuver, ReversesHeadingAndShiftsBySpacing)
{
    NavConfig cfg;
    for (auto dir : {TurnDirection::left, TurnDirection::right}) {
        for (double heading_deg : {0.0, 90.0, 180.0, -37.0}) {
            RobotState s;
            s.position = {3.0, 1.0};
            s.heading_rad = deg_to_rad(heading_deg);
            const double spacing = 0.6;
            const auto cmds = end_of_row_maneuver(spacing, dir, cfg);
            ASSERT_EQ(cmds.size(), 4u);
            EXPECT_EQ(cmds[0], MotionCommand::advance(cfg.exit_distance_m));
            const auto out = run_commands(s, cmds, cfg);
            EXPECT_NEAR(std::abs(normalize_angle(out.heading_rad - s.heading_rad)), kPi, 1e-9);
            const Vec2 d = out.position - s.position;
            const Vec2 fwd{std::cos(s.heading_rad), std::sin(s.heading_rad)};
            const Vec2 left{-fwd.y, fwd.x};
            const double lateral = d.dot(left);
            EXPECT_NEAR(std::abs(lateral), spacing, 1e-3);
            EXPECT_GT(lateral * (dir == TurnDirection::left ? 1.0 : -1.0), 0.0);
            EXPECT_NEAR(d.dot(fwd), cfg.exit_distance_m, 1e-3);
        }
    }
}

TEST(ApplyCommand, TurnTakesTimeAtTurnRate)
{
    NavConfig cfg;
    RobotState s;
    const auto t = apply_command(s, MotionCommand::turn(45.0), cfg);
    EXPECT_NEAR(rad_to_deg(t.heading_rad), 45.0, 1e-9);
    EXPECT_NEAR(t.clock_s, 45.0 / cfg.turn_rate_deg_s, 1e-9);
    EXPECT_NEAR(t.position.norm(), 0.0, 1e-12);
    const auto a = apply_command(s, MotionCommand::advance(0.3), cfg);
    EXPECT_NEAR(a.position.x, 0.3, 1e-12);
    EXPECT_NEAR(a.clock_s, 0.3 / (cfg.speed_cm_s / 100.0), 1e-9);
}

TEST(Mission, ShortRunLogsModesAndCsv)
{
    auto world = field(2, 2.0, 5.0);
    MissionConfig cfg;
    cfg.nav.speed_cm_s = 50.0;
    const auto log = run_mission(world, cfg);
    EXPECT_FALSE(log.aborted) << log.abort_reason;
    EXPECT_EQ(log.rows_completed, 2);
    ASSERT_FALSE(log.modes.empty());
    EXPECT_EQ(log.modes.front(), NavMode::aligning);
    EXPECT_EQ(log.modes.back(), NavMode::done);
    for (std::size_t i = 1; i < log.modes.size(); ++i) {
        EXPECT_TRUE(transition_allowed(log.modes[i - 1], log.modes[i]));
    }
    EXPECT_EQ(log.weeds_total, world.weeds.size());
    EXPECT_EQ(world.eliminated_count(), log.weeds_eliminated);
    EXPECT_LE(log.weeds_eliminated, log.weeds_detected);
    EXPECT_GE(log.hit_rate(), 0.0);
    EXPECT_LE(log.hit_rate(), 1.0);
    EXPECT_NEAR(log.total_time_s, log.drive_time_s + log.stop_time_s, 1e-6);
    std::ostringstream os;
    log.write_csv(os);
    EXPECT_EQ(os.str().rfind("t,event,x,y,heading,detail\r\n", 0), 0u);
}

TEST(Mission, DeterministicForSameSeed)
{
    MissionConfig cfg;
    cfg.nav.speed_cm_s = 60.0;
    auto w1 = field(1, 2.0, 6.0);
    auto w2 = field(1, 2.0, 6.0);
    std::ostringstream a;
    std::ostringstream b;
    run_mission(w1, cfg).write_csv(a);
    run_mission(w2, cfg).write_csv(b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Mission, ZeroWeedsGivesPureDrivingTime)
{
    auto world = field(1, 3.0, 0.0);
    MissionConfig cfg;
    cfg.nav.speed_cm_s = 50.0;
    cfg.nav.max_rows = 1;
    const auto log = run_mission(world, cfg);
    ASSERT_FALSE(log.aborted);
    EXPECT_EQ(log.weeds_detected, 0u);
    EXPECT_NEAR(log.weeding_time_s_per_m(), 100.0 / 50.0, 0.05);
}

TEST(Mission, NoRowMeansDoneAfterSearch)
{
    auto world = field(1, 1.0, 0.0);
    MissionConfig cfg;
    cfg.start = Pose2D{{5.0, 3.0}, 0.0};
    const auto log = run_mission(world, cfg);
    EXPECT_EQ(log.rows_completed, 0);
    EXPECT_EQ(log.modes.back(), NavMode::done);
}

TEST(Mission, ImpassableObstacleAbortsAsStuck)
{
    auto world = field(1, 3.0, 0.0);
    world.obstacles.push_back({{1.2, 0.3 + 0.203}, 15.0, ObstacleKind::rock});
    MissionConfig cfg;
    const auto log = run_mission(world, cfg);
    EXPECT_TRUE(log.aborted);
    EXPECT_TRUE(log.stuck);
    EXPECT_NE(log.abort_reason.find("stuck"), std::string::npos);
}
