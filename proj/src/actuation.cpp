#include "weedbot/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "weedbot/error.hpp"

namespace weedbot::actuation {

GantryConfig GantryConfig::defaults()
{
    GantryConfig cfg;
    cfg.x = {Drive::belt, 2.0, 20, 200, 16, 400.0, false, 8000.0, 1.45};
    cfg.y = {Drive::lead_screw, 2.0, 1, 200, 16, 300.0, true, 80000.0, 0.80};
    cfg.z = {Drive::lead_screw, 2.0, 1, 200, 16, 300.0, false, 80000.0, 0.0};
    return cfg;
}

double axis_resolution(const AxisConfig& axis)
{
    return (axis.pitch_mm * axis.teeth) / (static_cast<double>(axis.steps_per_rev) * axis.microstepping);
}

namespace {

double component(const Vec3& v, int i)
{
    return i == 0 ? v.x : (i == 1 ? v.y : v.z);
}

void set_component(Vec3& v, int i, double value)
{
    (i == 0 ? v.x : (i == 1 ? v.y : v.z)) = value;
}

}  // namespace

GantryState home(const GantryState& state)
{
    GantryState s = state;
    s.position = {};
    s.step_count = {};
    s.y_motor_count = {};
    s.homed = true;
    s.laser_on = false;
    s.limit_hit = {};
    s.settle_offset_mm = {};
    return s;
}

StepPlan plan_move(const GantryConfig& config, const GantryState& state, const Vec3& target_mm)
{
    if (!state.homed) {
        throw SafetyError("gantry must be homed before planning a move");
    }
    StepPlan plan;
    for (int i = 0; i < 3; ++i) {
        const auto& axis = config.axis(i);
        const double target = component(target_mm, i);
        if (!(target >= 0.0 && target <= axis.travel_mm)) {
            throw OutOfRangeError(kAxisNames[i], std::string("target outside travel on axis ") + kAxisNames[i]);
        }
        const double res = axis_resolution(axis);
        const double requested = target - component(state.position, i);
        const std::int64_t target_steps = std::llround(target / res);
        plan.steps[i] = target_steps - state.step_count[i];
        if (config.quantize) {
            plan.realized_mm[i] = static_cast<double>(plan.steps[i]) * res;
        } else {
            plan.realized_mm[i] = requested;
        }
        plan.residual_mm[i] = requested - plan.realized_mm[i];
        plan.duration_s = std::max(plan.duration_s, std::abs(static_cast<double>(plan.steps[i])) / axis.step_rate_hz);
    }
    plan.y_motor_steps = {plan.steps[1], plan.steps[1]};
    return plan;
}

GantryState execute_plan(const GantryConfig& config, const GantryState& state, const StepPlan& plan)
{
    if (!state.homed) {
        throw SafetyError("gantry must be homed before moving");
    }
    GantryState s = state;
    double duration = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto& axis = config.axis(i);
        const double res = axis_resolution(axis);
        const auto max_steps = static_cast<std::int64_t>(std::floor(axis.travel_mm / res + 1e-9));
        std::int64_t next = state.step_count[i] + plan.steps[i];
        double pos = component(state.position, i) + plan.realized_mm[i];
        s.limit_hit[i] = false;
        if (next < 0 || pos < 0.0) {
            next = 0;
            pos = 0.0;
            s.limit_hit[i] = true;
        } else if (next > max_steps || pos > axis.travel_mm) {
            next = max_steps;
            pos = axis.travel_mm;
            s.limit_hit[i] = true;
        }
        const std::int64_t moved = next - state.step_count[i];
        s.step_count[i] = next;
        set_component(s.position, i, config.quantize ? static_cast<double>(next) * res : pos);
        duration = std::max(duration, std::abs(static_cast<double>(moved)) / axis.step_rate_hz);
    }
    s.y_motor_count = {s.step_count[1], s.step_count[1]};
    s.clock_s += duration;
    return s;
}

GantryState settle(const GantryConfig& config, const GantryState& state, Rng& rng)
{
    GantryState s = state;
    s.settle_offset_mm = {config.x.repeatability_sigma_mm * standard_normal(rng),
                          config.y.repeatability_sigma_mm * standard_normal(rng)};
    return s;
}

DescentResult descend_to_weed(const GantryConfig& config, const GantryState& state, const TargetGeometry& weed,
                              double noise_sigma_mm, Rng& rng)
{
    if (!state.homed) {
        throw SafetyError("gantry must be homed before descending");
    }
    DescentResult out;
    const double aperture = state.aperture_height_mm(config);
    const double range_to_top = aperture - weed.height_mm;
    const double offset = (state.laser_axis_mm() - weed.center_mm).norm();
    const double cone = weed.radius_mm + std::max(0.0, range_to_top) * std::tan(deg_to_rad(config.ultrasonic.cone_half_angle_deg));

    double target_z = config.z.travel_mm;
    if (range_to_top > 0.0 && offset <= cone) {
        double noise = noise_sigma_mm > 0.0 ? noise_sigma_mm * standard_normal(rng) : 0.0;
        noise = std::clamp(noise, -3.0 * noise_sigma_mm, 3.0 * noise_sigma_mm);
        out.measured_range_mm = range_to_top + noise;
        target_z = std::clamp(state.position.z + out.measured_range_mm - config.laser.standoff_mm, 0.0,
                              config.z.travel_mm);
        out.detected = true;
    }
    const auto plan = plan_move(config, state, {state.position.x, state.position.y, target_z});
    out.state = execute_plan(config, state, plan);
    out.state.settle_offset_mm = state.settle_offset_mm;
    if (!out.detected) {
        out.state.limit_hit[2] = true;
    }
    return out;
}

FireResult fire(const GantryConfig& config, const GantryState& state, const TargetGeometry& target, Weed& weed,
                bool burn)
{
    if (!state.homed) {
        throw SafetyError("refusing to fire an unhomed laser");
    }
    FireResult out;
    out.state = state;
    const double miss = (state.laser_axis_mm() - target.center_mm).norm();
    out.hit = miss <= target.radius_mm + config.laser.kill_margin_mm;
    if (out.hit && burn) {
        weed.eliminated = true;
    }
    out.state.laser_on = false;
    out.state.clock_s += config.laser.exposure_s;
    return out;
}

}  // namespace weedbot::actuation
