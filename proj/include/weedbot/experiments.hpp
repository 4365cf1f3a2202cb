#pragma once

#include <cstdint>
#include <vector>

#include "weedbot/geometry.hpp"
#include "weedbot/kinematics.hpp"
#include "weedbot/navigation.hpp"
#include "weedbot/world.hpp"

namespace weedbot {

struct LinearFit {
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};

    [[nodiscard]] double at(double x) const { return slope * x + intercept; }
};

/// Ordinary least squares over (x, y) points. R^2 is 1 when y is constant.
LinearFit linear_fit(const std::vector<Vec2>& points);

/// x where two fitted lines cross.
double optimal_speed(const LinearFit& detection, const LinearFit& weeding_time);

struct SummaryStats {
    std::size_t count{0};
    double mean{0.0};
    double stddev{0.0};   ///< sample standard deviation (n - 1), 0 below two samples
    double min{0.0};
    double max{0.0};
};

SummaryStats summarize(const std::vector<double>& values);

/// Bins [k w, (k + 1) w) starting at zero; negative values are rejected.
struct Histogram {
    double bin_width{0.5};
    std::vector<std::size_t> counts;

    [[nodiscard]] std::size_t total() const;
};

Histogram histogram(const std::vector<double>& values, double bin_width);

/// Shared inputs of the three studies.
struct StudyConfig {
    ScenarioSpec scenario;
    MissionConfig mission;
    std::uint64_t seed{1};
    /// Worker threads for independent trials; results are reduced in input order.
    int parallel{1};
};

struct SweepRow {
    double speed_cm_s{0.0};
    int trial{0};
    std::uint64_t seed{0};
    std::size_t weeds_total{0};
    std::size_t weeds_detected{0};
    std::size_t false_positives{0};
    double detection_pct{0.0};
    double weeding_time_s_per_m{0.0};
    double mission_time_s{0.0};
};

struct SpeedSweepModel {
    LinearFit detection;     ///< detection % against speed
    LinearFit weeding_time;  ///< s/m against speed
    double optimal_speed_cm_s{0.0};
    bool has_optimum{false};
};

struct SweepResult {
    std::vector<SweepRow> rows;
    SpeedSweepModel model;
};

/// Pointer-marking missions at each speed. Trial t uses the study seed for
/// t = 0 and a derived seed otherwise, for both the field and the sensors.
SweepResult run_speed_sweep(const StudyConfig& config, const std::vector<double>& speeds, int trials);

struct WeedError {
    int weed_index{-1};
    double ex_mm{0.0};
    double ey_mm{0.0};
    double e_sq_mm2{0.0};   ///< ex^2 + ey^2
    double e_mm{0.0};       ///< sqrt(e_sq_mm2)
    bool hit{false};
};

struct AccuracyReport {
    double speed_cm_s{0.0};
    std::vector<WeedError> errors;
    SummaryStats ex;   ///< of |ex|
    SummaryStats ey;   ///< of |ey|
    SummaryStats e;
    Histogram hist_ex;
    Histogram hist_ey;
    Histogram hist_e;
    std::size_t weeds_total{0};
    std::size_t weeds_detected{0};
    std::size_t weeds_eliminated{0};
    std::size_t spots_missing{0};
    double detection_rate{0.0};
    double hit_rate{0.0};
    double mission_time_s{0.0};
};

/// Per-shot error as seen by a mirrored secondary camera.
struct SpotMeasurement {
    bool found{false};
    double ex_mm{0.0};
    double ey_mm{0.0};
};

/// Renders the secondary view with the laser spot at `laser_axis_mm`, finds the
/// spot, undoes the mirror and compares it with the weed center in millimeters.
SpotMeasurement measure_spot(const FieldScenario& world, const Pose2D& robot, const Vec2& laser_axis_mm,
                             const Vec2& weed_world, const MissionConfig& mission, const vision::CameraModel& secondary,
                             std::uint64_t noise_seed);

/// The mirrored secondary camera: same footprint as the downward camera.
vision::CameraModel secondary_camera(const MissionConfig& mission);

AccuracyReport run_accuracy_study(const StudyConfig& config, double speed_cm_s, double bin_width_mm = 0.5);

struct StabilityRow {
    Obstacle obstacle;
    kinematics::TraversalOutcome predicted;
    kinematics::TraversalOutcome observed;
    double max_heading_error_deg{0.0};
    double max_extra_blur_px{0.0};
    bool stuck{false};
};

struct StabilityReport {
    std::vector<StabilityRow> rows;

    [[nodiscard]] std::size_t consistent_rows() const;
};

struct StabilityConfig {
    double row_length_m{3.0};
    double obstacle_along_m{1.5};
    double speed_cm_s{30.0};
};

/// One short weed-free mission per obstacle, placed under the left wheel
/// track; the observed row is classified back from what the mission saw.
StabilityReport run_stability_study(const StudyConfig& config, const std::vector<Obstacle>& obstacles,
                                    const StabilityConfig& stability = {});

/// The published obstacle trials: kind and height.
std::vector<Obstacle> reference_obstacles();

}  // namespace weedbot
