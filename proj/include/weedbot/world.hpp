#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "weedbot/geometry.hpp"

namespace weedbot {

struct CropRow {
    Vec2 start;                  ///< first end of the row line [m]
    Vec2 direction{1.0, 0.0};    ///< unit vector along the row
    double plant_spacing_m{0.20};
    double plant_radius_m{0.04};
    double length_m{10.0};

    /// Plant centers along the row, the first half a spacing in from the start.
    [[nodiscard]] std::vector<Vec2> plant_centers() const;
    [[nodiscard]] Vec2 end() const { return start + direction * length_m; }
};

struct Weed {
    Vec2 position;
    double stem_radius_m{0.005};
    double height_m{0.08};
    bool eliminated{false};
};

enum class ObstacleKind { rock, organic, incline };

struct Obstacle {
    Vec2 position;
    double height_cm{5.0};
    ObstacleKind kind{ObstacleKind::rock};
};

std::string to_string(ObstacleKind kind);
ObstacleKind obstacle_kind_from_string(const std::string& name);

struct FieldScenario {
    double width_m{0.0};
    double length_m{0.0};
    std::vector<CropRow> rows;
    std::vector<Weed> weeds;
    std::vector<Obstacle> obstacles;
    std::uint64_t seed{0};

    [[nodiscard]] std::vector<Vec2> crop_centers() const;
    [[nodiscard]] double inter_row_spacing_m() const;
    [[nodiscard]] std::size_t eliminated_count() const;
};

/// Inputs to the scenario generator. Rows run along +x and are stacked along +y.
struct ScenarioSpec {
    double length_m{10.0};
    int row_count{2};
    double row_spacing_m{0.60};
    double plant_spacing_m{0.20};
    double plant_radius_m{0.04};
    /// Weeds per meter of field length, summed over all rows.
    double weed_density_per_m{19.3};
    /// Weeds are scattered within this lateral distance of a row line.
    double weed_band_half_width_m{0.158};
    double weed_radius_min_m{0.0025};
    double weed_radius_max_m{0.0110};
    double weed_height_min_m{0.03};
    double weed_height_max_m{0.15};
    /// Minimum center distance between two weeds.
    double weed_min_separation_m{0.03};
    /// Minimum gap between a weed disc and a crop disc.
    double crop_clearance_m{0.004};
    std::vector<Obstacle> obstacles;
};

FieldScenario generate_scenario(const ScenarioSpec& spec, std::uint64_t seed);

/// Writes `entity,x,y,attributes` rows for every crop plant, weed and obstacle.
void write_scenario_csv(const FieldScenario& scenario, std::ostream& os);

/// Chassis dimensions used by the skid-steer model and the crop-safety check.
struct RobotGeometry {
    double track_width_m{0.406};
    /// Longitudinal offsets of the three wheels on each side.
    double wheel_offsets_m[3]{0.33, 0.0, -0.33};
    double wheel_half_width_m{0.03};
    double max_side_speed_cm_s{100.0};

    /// Contact-patch centers of all six wheels in the body frame.
    [[nodiscard]] std::vector<Vec2> wheel_contacts() const;
};

struct RobotState {
    Vec2 position;
    double heading_rad{0.0};
    double linear_speed_cm_s{0.0};
    double odometer_m{0.0};
    double clock_s{0.0};

    [[nodiscard]] Pose2D pose() const { return {position, heading_rad}; }
};

/// Per-side track speeds; the three wheels on one side share a speed.
struct WheelSpeeds {
    double left_cm_s{0.0};
    double right_cm_s{0.0};
};

/// Skid-steer pose integration over `dt_s`, exact for constant side speeds.
RobotState advance(const RobotState& state, WheelSpeeds speeds, double dt_s,
                   const RobotGeometry& geometry = {});

}  // namespace weedbot
