#pragma once

#include "weedbot/world.hpp"

namespace weedbot::kinematics {

/// Double four-bar (slider-crank) suspension geometry. Lengths in mm, angles in degrees.
struct SuspensionConfig {
    double a{270.0};       ///< crank length
    double b{320.0};       ///< connecting link length
    double c{195.0};       ///< fixed / slider link offset
    double theta2{30.0};   ///< angle between slider axis and crank at max deflection
    double h{320.0};       ///< robot height
    double r{92.0};        ///< wheel radius

    /// Original (rest) slider position d_n = h - r.
    [[nodiscard]] double d_n() const { return h - r; }
};

struct SuspensionPose {
    double theta3{0.0};      ///< connecting-link angle [deg]
    double d_m{0.0};         ///< slider position at max deflection [mm]
    double max_lift_mm{0.0};
};

/// Published reference values for the Table I geometry. They do not follow
/// from the closed-form equations evaluated on the same inputs; both paths
/// are kept side by side.
struct ReferenceConstants {
    static constexpr double theta3_deg = -10.47;
    static constexpr double d_m_mm = -90.69;
};

/// theta3 = asin((a sin theta2 - c) / b). Throws LinkGeometryError when the
/// loop cannot close.
double solve_theta3(const SuspensionConfig& config);

/// d_m = a cos theta2 - b cos theta3.
double solve_slider_position(const SuspensionConfig& config, double theta3_deg);

/// Vector-loop residual a sin theta2 - b sin theta3 - c [mm]; zero on a closed loop.
double loop_residual(const SuspensionConfig& config, double theta3_deg);

/// Lift for a given max-deflection slider position: d_n - |d_m|.
double lift_from_slider(const SuspensionConfig& config, double d_m_mm);

struct LiftReport {
    SuspensionPose formula;    ///< recomputed through the closed-form equations
    SuspensionPose reference;  ///< published constants
};

/// Both lift paths. The reference path drives the traversal thresholds.
LiftReport max_wheel_lift(const SuspensionConfig& config);

enum class Climb { yes, partial, no };
enum class NavEffect { none, light_deviation, significant_deviation };
enum class ImageEffect { none, partial_distortion, unstable };

struct TraversalOutcome {
    Climb climb{Climb::yes};
    NavEffect nav_effect{NavEffect::none};
    ImageEffect image_effect{ImageEffect::none};

    bool operator==(const TraversalOutcome&) const = default;
};

/// Obstacle model constants, calibrated against the field obstacle trials.
struct TraversalModel {
    double rock_factor{1.0};
    double organic_factor{0.85};
    double incline_factor{1.25};
    double smooth_climb_limit_cm{10.5};   ///< effective height up to which the climb is clean
    double light_deviation_onset_cm{10.0};

    [[nodiscard]] double kind_factor(ObstacleKind kind) const;
};

double effective_height_cm(const Obstacle& obstacle, const TraversalModel& model = {});

/// Classifies an obstacle. The partial/no boundary is the reference-path max lift.
TraversalOutcome traversal_outcome(const Obstacle& obstacle, const SuspensionConfig& config,
                                   const TraversalModel& model = {});

const char* to_string(Climb c);
const char* to_string(NavEffect e);
const char* to_string(ImageEffect e);
/// Short codes as printed in the obstacle table (Y/P/N, NE/LD/SD, NE/PD/UI).
const char* short_code(Climb c);
const char* short_code(NavEffect e);
const char* short_code(ImageEffect e);

}  // namespace weedbot::kinematics
