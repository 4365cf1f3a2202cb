#pragma once

#include <cmath>
#include <numbers>

namespace weedbot {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;

    [[nodiscard]] double norm() const { return std::hypot(x, y); }
    [[nodiscard]] constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
};

struct Vec3 {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr bool operator==(const Vec3&) const = default;
};

/// Planar rigid pose: translation plus heading (CCW positive, radians).
struct Pose2D {
    Vec2 position;
    double heading_rad{0.0};
};

constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double rad)
{
    double a = std::remainder(rad, 2.0 * kPi);
    if (a <= -kPi) {
        a += 2.0 * kPi;
    }
    return a;
}

inline Vec2 rotate(const Vec2& v, double rad)
{
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Maps a point from a body frame (forward = +x, left = +y) into the world.
inline Vec2 body_to_world(const Pose2D& pose, const Vec2& body)
{
    return pose.position + rotate(body, pose.heading_rad);
}

inline Vec2 world_to_body(const Pose2D& pose, const Vec2& world)
{
    return rotate(world - pose.position, -pose.heading_rad);
}

}  // namespace weedbot
