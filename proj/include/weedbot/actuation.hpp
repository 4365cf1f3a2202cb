#pragma once

#include <array>
#include <cstdint>

#include "weedbot/geometry.hpp"
#include "weedbot/rng.hpp"
#include "weedbot/world.hpp"

namespace weedbot::actuation {

enum class Drive { belt, lead_screw };

struct AxisConfig {
    Drive drive{Drive::lead_screw};
    double pitch_mm{2.0};       ///< belt pitch, or screw lead
    int teeth{1};               ///< pulley teeth; 1 for screws
    int steps_per_rev{200};
    int microstepping{16};
    double travel_mm{300.0};
    bool dual_motor{false};
    double step_rate_hz{2000.0};           ///< microsteps per second
    double repeatability_sigma_mm{0.0};    ///< random settle error per move
};

struct LaserConfig {
    double power_w{2.5};
    double wavelength_nm{450.0};
    double exposure_s{2.0};
    double standoff_mm{50.0};
    double kill_margin_mm{1.0};
};

struct UltrasonicConfig {
    double cone_half_angle_deg{15.0};
    double noise_sigma_mm{0.0};
};

struct GantryConfig {
    AxisConfig x;
    AxisConfig y;
    AxisConfig z;
    LaserConfig laser;
    UltrasonicConfig ultrasonic;
    /// Laser aperture height above ground at z = 0; z grows downwards.
    double mount_height_mm{300.0};
    /// When false, moves land exactly on the requested coordinate.
    bool quantize{true};

    /// Defaults: 2 mm GT2 belt on x, twin 2 mm lead screws on y, one on z.
    static GantryConfig defaults();
    [[nodiscard]] const AxisConfig& axis(int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

/// Linear travel per microstep: (pitch * teeth) / (steps_per_rev * microstepping).
double axis_resolution(const AxisConfig& axis);

inline constexpr std::array<const char*, 3> kAxisNames{"x", "y", "z"};

struct StepPlan {
    std::array<std::int64_t, 3> steps{};
    /// Both y motors; always identical.
    std::array<std::int64_t, 2> y_motor_steps{};
    std::array<double, 3> realized_mm{};
    /// requested - realized, per axis.
    std::array<double, 3> residual_mm{};
    double duration_s{0.0};
};

struct GantryState {
    Vec3 position;                          ///< commanded carriage position [mm]
    std::array<std::int64_t, 3> step_count{};
    std::array<std::int64_t, 2> y_motor_count{};
    bool homed{false};
    bool laser_on{false};
    std::array<bool, 3> limit_hit{};
    double clock_s{0.0};
    /// Physical deviation of the laser axis from the commanded x/y after the last settle.
    Vec2 settle_offset_mm;

    [[nodiscard]] Vec2 laser_axis_mm() const { return Vec2{position.x, position.y} + settle_offset_mm; }
    [[nodiscard]] double aperture_height_mm(const GantryConfig& cfg) const { return cfg.mount_height_mm - position.z; }
};

GantryState home(const GantryState& state);

/// Absolute-target step plan: steps are recomputed from the homed origin each
/// move, so quantization error never accumulates.
StepPlan plan_move(const GantryConfig& config, const GantryState& state, const Vec3& target_mm);

/// Applies a plan. A virtual limit switch truncates motion at the end of travel.
GantryState execute_plan(const GantryConfig& config, const GantryState& state, const StepPlan& plan);

/// Samples the per-move settle error of the x and y carriages.
GantryState settle(const GantryConfig& config, const GantryState& state, Rng& rng);

/// A weed expressed in the gantry frame.
struct TargetGeometry {
    Vec2 center_mm;
    double radius_mm{5.0};
    double height_mm{80.0};
};

struct DescentResult {
    GantryState state;
    bool detected{false};
    double measured_range_mm{0.0};
};

/// Lowers the laser until the ultrasonic range to the weed top equals the
/// standoff. Sensor noise is Gaussian truncated at 3 sigma.
DescentResult descend_to_weed(const GantryConfig& config, const GantryState& state,
                              const TargetGeometry& weed, double noise_sigma_mm, Rng& rng);

struct FireResult {
    GantryState state;
    bool hit{false};
};

/// Fires for the configured exposure. With `burn` false the shot is only a
/// pointer mark and the weed is not flagged.
FireResult fire(const GantryConfig& config, const GantryState& state, const TargetGeometry& target, Weed& weed,
                bool burn = true);

}  // namespace weedbot::actuation
