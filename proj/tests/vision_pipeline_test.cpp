#include <gtest/gtest.h>

#include <cmath>

#include "weedbot/rng.hpp"
#include "weedbot/vision/pipeline.hpp"
#include "weedbot/vision/render.hpp"

using namespace weedbot;
using namespace weedbot::vision;

namespace {

FieldScenario single_row(double length = 4.0)
{
    ScenarioSpec spec;
    spec.length_m = length;
    spec.row_count = 1;
    spec.weed_density_per_m = 0.0;
    return generate_scenario(spec, 1);
}

RobotState at(double x, double y, double heading_deg = 0.0, double speed = 0.0)
{
    RobotState s;
    s.position = {x, y};
    s.heading_rad = deg_to_rad(heading_deg);
    s.linear_speed_cm_s = speed;
    return s;
}

}  // namespace

TEST(Camera, PixelBodyRoundTrip)
{
    for (const auto& cam : {CameraModel::downward(), CameraModel::front()}) {
        Rng rng(mix_seed(9, 1));
        for (int i = 0; i < 200; ++i) {
            const Vec2 px{uniform(rng, 0.0, cam.width), uniform(rng, 0.0, cam.height)};
            const Vec2 back = cam.body_to_pixel(cam.pixel_to_body(px));
            EXPECT_NEAR(back.x, px.x, 1e-9);
            EXPECT_NEAR(back.y, px.y, 1e-9);
        }
    }
}

TEST(Camera, DownwardAxes)
{
    const auto cam = CameraModel::downward();
    const Vec2 c{(cam.width - 1) / 2.0, (cam.height - 1) / 2.0};
    const Vec2 center = cam.pixel_to_body(c);
    EXPECT_NEAR(center.x, cam.mount.position.x, 1e-12);
    EXPECT_NEAR(center.y, cam.mount.position.y, 1e-12);
    // u forward, v to the right (negative body y).
    const Vec2 du = cam.pixel_to_body({c.x + 10.0, c.y}) - center;
    const Vec2 dv = cam.pixel_to_body({c.x, c.y + 10.0}) - center;
    EXPECT_NEAR(du.x, 10.0 * cam.meters_per_px_u(), 1e-12);
    EXPECT_NEAR(dv.y, -10.0 * cam.meters_per_px_v(), 1e-12);
    EXPECT_DOUBLE_EQ(cam.meters_per_px_u() * 1000.0, 0.625);
}

TEST(Camera, MirrorFlipsRows)
{
    auto cam = CameraModel::downward();
    const Vec2 body{-0.15, 0.05};
    const Vec2 plain = cam.body_to_pixel(body);
    cam.mirrored = true;
    const Vec2 mirrored = cam.body_to_pixel(body);
    const Vec2 undone = mirror_transform(mirrored, cam.height);
    EXPECT_NEAR(undone.x, plain.x, 1e-12);
    EXPECT_NEAR(undone.y, plain.y, 1e-12);
}

TEST(Render, DeterministicAndSeedSensitive)
{
    const auto world = generate_scenario(ScenarioSpec{}, 2);
    const auto s = at(2.0, 0.3, 0.0, 40.0);
    const auto cam = CameraModel::downward();
    EXPECT_EQ(render_view(world, s, cam, 5), render_view(world, s, cam, 5));
    EXPECT_NE(render_view(world, s, cam, 5), render_view(world, s, cam, 6));
}

TEST(Render, BlurGrowsWithSpeed)
{
    const auto cam = CameraModel::downward();
    EXPECT_DOUBLE_EQ(motion_blur_length_px(cam, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(motion_blur_length_px(cam, 40.0), 40.0 * cam.motion_blur_px_per_cmps);
    EXPECT_DOUBLE_EQ(motion_blur_length_px(CameraModel::front(), 70.0), 0.0);
}

TEST(WeedDetection, FindsPlacedWeedsAtRest)
{
    auto world = single_row();
    const auto cam = CameraModel::downward();
    const auto s = at(1.5, 0.3);
    // Weeds inside the camera footprint, clear of the crop plants.
    const std::vector<Vec2> body{{-0.30, 0.09}, {-0.12, -0.10}, {-0.25, -0.07}, {-0.08, 0.11}};
    for (const auto& b : body) {
        Weed w;
        w.position = body_to_world(s.pose(), b);
        w.stem_radius_m = 0.006;
        world.weeds.push_back(w);
    }
    RenderOptions opts;
    const auto img = render_view(world, s, cam, 17, opts);
    const auto det = detect_weeds(img);
    ASSERT_EQ(det.centroids_px.size(), body.size());
    for (const auto& b : body) {
        const Vec2 px = cam.body_to_pixel(b);
        double best = 1e9;
        for (const auto& c : det.centroids_px) {
            best = std::min(best, (c - px).norm());
        }
        EXPECT_LT(best, 1.5);
    }
}

TEST(WeedDetection, CropOnlyFrameHasNoTargets)
{
    const auto world = single_row();
    const auto cam = CameraModel::downward();
    for (double x = 1.0; x < 2.0; x += 0.05) {
        const auto img = render_view(world, at(x, 0.3), cam, 3);
        EXPECT_TRUE(detect_weeds(img).centroids_px.empty()) << x;
    }
}

TEST(WeedDetection, WorkAreaRestrictsSearch)
{
    auto world = single_row();
    const auto cam = CameraModel::downward();
    const auto s = at(1.5, 0.3);
    Weed w;
    w.position = body_to_world(s.pose(), {-0.30, 0.09});
    world.weeds.push_back(w);
    const auto img = render_view(world, s, cam, 4);
    const Vec2 px = cam.body_to_pixel({-0.30, 0.09});
    ASSERT_EQ(detect_weeds(img).centroids_px.size(), 1u);
    const Rect away{static_cast<int>(px.x) + 60, 0, 200, cam.height};
    EXPECT_TRUE(detect_weeds(img, away).centroids_px.empty());
    const Rect around{static_cast<int>(px.x) - 40, static_cast<int>(px.y) - 40, 80, 80};
    const auto local = detect_weeds(img, around);
    ASSERT_EQ(local.centroids_px.size(), 1u);
    EXPECT_LT((local.centroids_px[0] - px).norm(), 1.5);
}

TEST(RowDetection, RecoversHeadingAndOffset)
{
    const auto world = single_row(6.0);
    const auto cam = CameraModel::front();
    for (double heading : {-12.0, -5.0, 0.0, 3.0, 9.0}) {
        for (double offset : {-0.06, 0.0, 0.04}) {
            const auto s = at(1.0, 0.3 + offset, heading);
            const auto rows = detect_rows(render_view(world, s, cam, 8));
            const auto row = select_row(rows);
            ASSERT_TRUE(row.has_value()) << heading << ' ' << offset;
            EXPECT_NEAR(row->angle_deg, -heading, 0.5) << heading << ' ' << offset;
            // Lateral offset of the row at the footprint center, in body terms.
            const Vec2 row_pt_body = world_to_body(s.pose(), {1.0 + cam.mount.position.x, 0.3});
            const double expected_px = cam.body_to_pixel(row_pt_body).x - (cam.width - 1) / 2.0;
            if (std::abs(heading) < 1e-9) {
                EXPECT_NEAR(row->lateral_offset_px(), expected_px, 1.0) << offset;
            }
        }
    }
}

TEST(RowDetection, EmptyFieldHasNoRow)
{
    const auto world = single_row(2.0);
    const auto rows = detect_rows(render_view(world, at(4.0, 0.3), CameraModel::front(), 1));
    EXPECT_TRUE(rows.empty());
}

TEST(LaserSpot, FoundAtDrawnPosition)
{
    const auto world = single_row();
    const auto cam = CameraModel::downward();
    RenderOptions opts;
    opts.laser_spot_body = Vec2{-0.22, 0.04};
    const auto img = render_view(world, at(1.0, 0.3), cam, 2, opts);
    const auto spot = detect_laser_spot(img);
    ASSERT_TRUE(spot.has_value());
    const Vec2 px = cam.body_to_pixel(*opts.laser_spot_body);
    EXPECT_LT((*spot - px).norm(), 0.5);
    EXPECT_FALSE(detect_laser_spot(render_view(world, at(1.0, 0.3), cam, 2)).has_value());
}

TEST(Calibration, PixelGantryRoundTrip)
{
    const auto cal = GantryCalibration::from_camera(CameraModel::downward());
    EXPECT_DOUBLE_EQ(cal.mm_per_px_u, 0.625);
    EXPECT_DOUBLE_EQ(cal.mm_per_px_v, 0.625);
    const Vec2 px{123.25, 301.5};
    const Vec2 mm = pixel_to_gantry(px, cal);
    EXPECT_DOUBLE_EQ(mm.x, 123.25 * 0.625);
    EXPECT_DOUBLE_EQ(mm.y, 301.5 * 0.625);
    const Vec2 back = gantry_to_pixel(mm, cal);
    EXPECT_NEAR(back.x, px.x, 1e-12);
    EXPECT_NEAR(back.y, px.y, 1e-12);
}

TEST(Mirror, IsAnInvolution)
{
    const Vec2 p{10.5, 33.0};
    const Vec2 m = mirror_transform(p, 480);
    EXPECT_DOUBLE_EQ(m.x, 10.5);
    EXPECT_DOUBLE_EQ(m.y, 479.0 - 33.0);
    const Vec2 back = mirror_transform(m, 480);
    EXPECT_DOUBLE_EQ(back.y, 33.0);
}
