#include "weedbot/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "weedbot/error.hpp"

namespace weedbot::kinematics {

namespace {

void check_lengths(const SuspensionConfig& cfg)
{
    if (!(cfg.a > 0.0) || !(cfg.b > 0.0) || !(cfg.c >= 0.0) || !(cfg.h > 0.0) || !(cfg.r > 0.0)) {
        throw InvalidArgument("suspension lengths must be positive");
    }
}

}  // namespace

double solve_theta3(const SuspensionConfig& config)
{
    check_lengths(config);
    const double arg = (config.a * std::sin(deg_to_rad(config.theta2)) - config.c) / config.b;
    if (!(std::abs(arg) <= 1.0)) {
        throw LinkGeometryError("four-bar loop cannot close: |(a sin theta2 - c)/b| > 1");
    }
    return rad_to_deg(std::asin(arg));
}

double solve_slider_position(const SuspensionConfig& config, double theta3_deg)
{
    return config.a * std::cos(deg_to_rad(config.theta2)) - config.b * std::cos(deg_to_rad(theta3_deg));
}

double loop_residual(const SuspensionConfig& config, double theta3_deg)
{
    return config.a * std::sin(deg_to_rad(config.theta2)) - config.b * std::sin(deg_to_rad(theta3_deg)) - config.c;
}

double lift_from_slider(const SuspensionConfig& config, double d_m_mm)
{
    return std::max(0.0, config.d_n() - std::abs(d_m_mm));
}

LiftReport max_wheel_lift(const SuspensionConfig& config)
{
    LiftReport report;
    report.formula.theta3 = solve_theta3(config);
    report.formula.d_m = solve_slider_position(config, report.formula.theta3);
    report.formula.max_lift_mm = lift_from_slider(config, report.formula.d_m);

    report.reference.theta3 = ReferenceConstants::theta3_deg;
    report.reference.d_m = ReferenceConstants::d_m_mm;
    report.reference.max_lift_mm = lift_from_slider(config, ReferenceConstants::d_m_mm);
    return report;
}

double TraversalModel::kind_factor(ObstacleKind kind) const
{
    switch (kind) {
    case ObstacleKind::rock:
        return rock_factor;
    case ObstacleKind::organic:
        return organic_factor;
    case ObstacleKind::incline:
        return incline_factor;
    }
    return rock_factor;
}

double effective_height_cm(const Obstacle& obstacle, const TraversalModel& model)
{
    return obstacle.height_cm * model.kind_factor(obstacle.kind);
}

TraversalOutcome traversal_outcome(const Obstacle& obstacle, const SuspensionConfig& config,
                                   const TraversalModel& model)
{
    const double limit_cm = max_wheel_lift(config).reference.max_lift_mm / 10.0;
    const double eff = effective_height_cm(obstacle, model);

    if (eff > limit_cm) {
        return {Climb::no, NavEffect::significant_deviation, ImageEffect::unstable};
    }
    if (eff > model.smooth_climb_limit_cm) {
        return {Climb::partial, NavEffect::light_deviation, ImageEffect::partial_distortion};
    }
    const NavEffect nav = eff >= model.light_deviation_onset_cm ? NavEffect::light_deviation : NavEffect::none;
    return {Climb::yes, nav, ImageEffect::none};
}

const char* to_string(Climb c)
{
    switch (c) {
    case Climb::yes:
        return "yes";
    case Climb::partial:
        return "partial";
    case Climb::no:
        return "no";
    }
    return "?";
}

const char* to_string(NavEffect e)
{
    switch (e) {
    case NavEffect::none:
        return "none";
    case NavEffect::light_deviation:
        return "light_deviation";
    case NavEffect::significant_deviation:
        return "significant_deviation";
    }
    return "?";
}

const char* to_string(ImageEffect e)
{
    switch (e) {
    case ImageEffect::none:
        return "none";
    case ImageEffect::partial_distortion:
        return "partial_distortion";
    case ImageEffect::unstable:
        return "unstable";
    }
    return "?";
}

const char* short_code(Climb c)
{
    switch (c) {
    case Climb::yes:
        return "Y";
    case Climb::partial:
        return "P";
    case Climb::no:
        return "N";
    }
    return "?";
}

const char* short_code(NavEffect e)
{
    switch (e) {
    case NavEffect::none:
        return "NE";
    case NavEffect::light_deviation:
        return "LD";
    case NavEffect::significant_deviation:
        return "SD";
    }
    return "?";
}

const char* short_code(ImageEffect e)
{
    switch (e) {
    case ImageEffect::none:
        return "NE";
    case ImageEffect::partial_distortion:
        return "PD";
    case ImageEffect::unstable:
        return "UI";
    }
    return "?";
}

}  // namespace weedbot::kinematics
