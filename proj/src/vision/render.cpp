#include "weedbot/vision/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "weedbot/rng.hpp"
#include "weedbot/vision/kernels.hpp"

namespace weedbot::vision {

Vec2 CameraModel::pixel_to_body(const Vec2& px) const
{
    const double v = mirrored ? (height - 1) - px.y : px.y;
    const Vec2 local{(px.x - (width - 1) / 2.0) * meters_per_px_u(), -(v - (height - 1) / 2.0) * meters_per_px_v()};
    return mount.position + rotate(local, mount.heading_rad);
}

Vec2 CameraModel::body_to_pixel(const Vec2& body) const
{
    const Vec2 local = rotate(body - mount.position, -mount.heading_rad);
    const double u = local.x / meters_per_px_u() + (width - 1) / 2.0;
    double v = -local.y / meters_per_px_v() + (height - 1) / 2.0;
    if (mirrored) {
        v = (height - 1) - v;
    }
    return {u, v};
}

CameraModel CameraModel::downward()
{
    CameraModel cam;
    cam.mount = {{-0.20, 0.0}, 0.0};
    cam.footprint_u_m = 0.40;
    cam.footprint_v_m = 0.30;
    cam.width = 640;
    cam.height = 480;
    cam.motion_blur_px_per_cmps = 0.75;
    return cam;
}

CameraModel CameraModel::front()
{
    CameraModel cam;
    cam.mount = {{0.90, 0.0}, -kPi / 2.0};
    cam.footprint_u_m = 1.60;
    cam.footprint_v_m = 1.00;
    cam.width = 200;
    cam.height = 125;
    cam.motion_blur_px_per_cmps = 0.0;
    return cam;
}

double motion_blur_length_px(const CameraModel& camera, double speed_cm_s)
{
    return camera.motion_blur_px_per_cmps * std::abs(speed_cm_s);
}

void draw_disc(RasterImage& rgb, const Vec2& center_px, double radius_px, Rgb color)
{
    const int x0 = std::max(0, static_cast<int>(std::floor(center_px.x - radius_px)));
    const int x1 = std::min(rgb.width() - 1, static_cast<int>(std::ceil(center_px.x + radius_px)));
    const int y0 = std::max(0, static_cast<int>(std::floor(center_px.y - radius_px)));
    const int y1 = std::min(rgb.height() - 1, static_cast<int>(std::ceil(center_px.y + radius_px)));
    const double r2 = radius_px * radius_px;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - center_px.x;
            const double dy = y - center_px.y;
            if (dx * dx + dy * dy <= r2) {
                rgb.at(x, y, 0) = color.r;
                rgb.at(x, y, 1) = color.g;
                rgb.at(x, y, 2) = color.b;
            }
        }
    }
}

namespace {

// Inverse normal CDF sampled at 65536 equiprobable midpoints; indexing it with
// 16 random bits gives a fast, platform-independent Gaussian sample.
const std::array<float, 65536>& normal_table()
{
    static const std::array<float, 65536> table = [] {
        std::array<float, 65536> t{};
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double p = (static_cast<double>(i) + 0.5) / 65536.0;
            double lo = -9.0;
            double hi = 9.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            t[i] = static_cast<float>(0.5 * (lo + hi));
        }
        return t;
    }();
    return table;
}

void draw_world_disc(RasterImage& img, const CameraModel& cam, const Pose2D& pose, const Vec2& world_center,
                     double radius_m, Rgb color)
{
    const Vec2 body = world_to_body(pose, world_center);
    const Vec2 c = cam.body_to_pixel(body);
    const double su = cam.meters_per_px_u();
    const double sv = cam.meters_per_px_v();
    const double ru = radius_m / su;
    const double rv = radius_m / sv;
    if (c.x + ru < -1 || c.y + rv < -1 || c.x - ru > cam.width || c.y - rv > cam.height) {
        return;
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(c.x - ru)));
    const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(c.x + ru)));
    const int y0 = std::max(0, static_cast<int>(std::floor(c.y - rv)));
    const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(c.y + rv)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = (x - c.x) * su;
            const double dy = (y - c.y) * sv;
            if (dx * dx + dy * dy <= radius_m * radius_m) {
                img.at(x, y, 0) = color.r;
                img.at(x, y, 1) = color.g;
                img.at(x, y, 2) = color.b;
            }
        }
    }
}

}  // namespace

RasterImage render_view(const FieldScenario& world, const RobotState& state, const CameraModel& camera,
                        std::uint64_t noise_seed, const RenderOptions& options)
{
    const Palette& pal = options.palette;
    std::vector<std::uint8_t> px(static_cast<std::size_t>(camera.width) * camera.height * 3);
    for (std::size_t i = 0; i < px.size(); i += 3) {
        px[i] = pal.soil.r;
        px[i + 1] = pal.soil.g;
        px[i + 2] = pal.soil.b;
    }
    RasterImage img(camera.width, camera.height, 3, std::move(px));
    const Pose2D pose = state.pose();

    for (const auto& row : world.rows) {
        for (const auto& c : row.plant_centers()) {
            draw_world_disc(img, camera, pose, c, row.plant_radius_m, pal.crop);
        }
    }
    for (const auto& w : world.weeds) {
        draw_world_disc(img, camera, pose, w.position, w.stem_radius_m, w.eliminated ? pal.burned : pal.weed);
    }

    const double blur = motion_blur_length_px(camera, state.linear_speed_cm_s) + options.extra_blur_px;
    if (blur > 1.0) {
        img = motion_blur(img, blur);
    }

    if (options.laser_spot_body) {
        const Vec2 c = camera.body_to_pixel(*options.laser_spot_body);
        // body_to_pixel already applied the mirror; draw in final image coordinates
        draw_disc(img, c, options.laser_spot_radius_m / camera.meters_per_px_u(), pal.laser);
    }

    if (options.noise && camera.pixel_noise_sigma > 0.0) {
        const auto& table = normal_table();
        Rng rng(mix_seed(noise_seed, 0x401e));
        auto bytes = img.data();
        std::uint64_t bits = 0;
        int left = 0;
        for (auto& b : bytes) {
            if (left == 0) {
                bits = rng();
                left = 4;
            }
            const float z = table[bits & 0xFFFF];
            bits >>= 16;
            --left;
            const long v = std::lround(b + camera.pixel_noise_sigma * z);
            b = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
        }
    }

    return img;
}

}  // namespace weedbot::vision
