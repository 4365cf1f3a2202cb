#pragma once

#include <cstdint>
#include <optional>

#include "weedbot/geometry.hpp"
#include "weedbot/vision/image.hpp"
#include "weedbot/world.hpp"

namespace weedbot::vision {

struct Rgb {
    std::uint8_t r{0};
    std::uint8_t g{0};
    std::uint8_t b{0};
};

struct Palette {
    Rgb soil{130, 85, 60};
    Rgb crop{60, 150, 40};
    Rgb weed{80, 180, 60};
    Rgb burned{45, 35, 28};
    Rgb laser{0, 70, 255};
};

/// Orthographic ground-looking camera rigidly mounted on the robot.
///
/// Pixel (u, v) has its center at integer coordinates. The image u axis points
/// along the mount heading and v points 90 degrees clockwise from it, so with
/// a zero-yaw mount u runs forward and v runs to the robot's right.
struct CameraModel {
    Pose2D mount;               ///< footprint center and u-axis heading in the body frame
    double footprint_u_m{0.4};
    double footprint_v_m{0.3};
    int width{640};
    int height{480};
    double pixel_noise_sigma{3.0};
    double motion_blur_px_per_cmps{0.12};
    bool mirrored{false};       ///< vertical mirror (v -> height - 1 - v)

    [[nodiscard]] double meters_per_px_u() const { return footprint_u_m / width; }
    [[nodiscard]] double meters_per_px_v() const { return footprint_v_m / height; }
    [[nodiscard]] Vec2 pixel_to_body(const Vec2& px) const;
    [[nodiscard]] Vec2 body_to_pixel(const Vec2& body) const;

    /// Rear-mounted downward camera over the laser working area.
    static CameraModel downward();
    /// Forward-looking row camera.
    static CameraModel front();
};

struct RenderOptions {
    Palette palette;
    /// Added to the speed-proportional motion blur (e.g. shake from an obstacle).
    double extra_blur_px{0.0};
    /// Laser impact point in the body frame, drawn after blur so it stays crisp.
    std::optional<Vec2> laser_spot_body;
    double laser_spot_radius_m{0.002};
    bool noise{true};
};

/// Synthetic frame of the field under the camera. Deterministic for a given
/// (world, state, camera, options, noise_seed).
RasterImage render_view(const FieldScenario& world, const RobotState& state, const CameraModel& camera,
                        std::uint64_t noise_seed, const RenderOptions& options = {});

/// Blur kernel length for a given speed.
double motion_blur_length_px(const CameraModel& camera, double speed_cm_s);

/// Draws a filled disc of pixel centers within `radius_px` of `center_px`.
void draw_disc(RasterImage& rgb, const Vec2& center_px, double radius_px, Rgb color);

}  // namespace weedbot::vision
