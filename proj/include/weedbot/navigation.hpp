#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "weedbot/actuation.hpp"
#include "weedbot/geometry.hpp"
#include "weedbot/kinematics.hpp"
#include "weedbot/vision/pipeline.hpp"
#include "weedbot/world.hpp"

namespace weedbot {

enum class NavMode { aligning, following, exiting, turning, done };

const char* to_string(NavMode mode);

/// aligning -> following -> exiting -> turning -> aligning, and any mode -> done.
bool transition_allowed(NavMode from, NavMode to);

struct NavConfig {
    /// Heading errors strictly above this trigger a corrective point turn.
    double deviation_threshold_deg{5.0};
    /// Straight run past the last visible row segment before turning.
    double exit_distance_m{1.2};
    /// Rows to traverse; 0 means every row in the scenario.
    int max_rows{0};
    double speed_cm_s{30.0};
    double frame_period_s{0.2};
    double turn_rate_deg_s{30.0};
    /// Mission aborts when the robot makes no progress for this long.
    double stuck_timeout_s{5.0};
    /// Detections closer than this to a known target are the same weed.
    double dedup_radius_m{0.015};
    /// Distance crept forward while looking for a row before giving up.
    double search_distance_m{2.0};
    /// Lateral offsets below this are not corrected during alignment.
    double align_tolerance_m{0.001};
    bool first_turn_left{true};
    /// Row change distance; 0 uses the spacing measured by the row detector.
    double inter_row_spacing_m{0.0};
    /// false: laser pointer marking only, weeds are not burned.
    bool fire{true};
    /// Braking and restart settling charged once per weeding stop.
    double stop_overhead_s{1.0};
    /// Return the gantry to its home corner at the end of every stop.
    bool park_after_stop{true};
};

struct NavState {
    NavMode mode{NavMode::aligning};
    std::optional<vision::DetectedRow> target_row;
    int rows_completed{0};
    double heading_error_deg{0.0};
};

struct MotionCommand {
    enum class Kind { advance, turn };
    Kind kind{Kind::advance};
    double value{0.0};   ///< meters for advance, degrees (CCW positive) for turn

    static MotionCommand advance(double meters) { return {Kind::advance, meters}; }
    static MotionCommand turn(double degrees) { return {Kind::turn, degrees}; }
    bool operator==(const MotionCommand&) const = default;
};

struct AlignCommand {
    double turn_deg{0.0};
    /// Sideways correction after the turn, positive to the right.
    double lateral_mm{0.0};

    [[nodiscard]] bool is_noop() const { return turn_deg == 0.0 && lateral_mm == 0.0; }
    /// Turn, then a 90 degree sidestep maneuver when a lateral correction is needed.
    [[nodiscard]] std::vector<MotionCommand> to_commands() const;
};

/// Turn by the row angle and shift by its image offset scaled to millimeters.
AlignCommand align_to_row(const vision::DetectedRow& row, double mm_per_px);

/// Row line expressed relative to the robot center.
struct RowEstimate {
    double angle_deg{0.0};     ///< row direction, CCW positive from the robot heading
    double lateral_m{0.0};     ///< perpendicular offset to the line once parallel, positive right
};

RowEstimate row_in_body(const vision::DetectedRow& row, const vision::CameraModel& camera);
AlignCommand align_to_row(const RowEstimate& row);

/// Straight for one frame when |error| <= threshold, otherwise a point turn of
/// -error. Updates the state's heading error.
MotionCommand follow_step(NavState& state, const vision::DetectedRow& row, const NavConfig& config);

enum class TurnDirection { left, right };

/// Exit run, 90 degree point turn toward the next row, advance the spacing, second 90 degree turn.
std::vector<MotionCommand> end_of_row_maneuver(double inter_row_spacing_m, TurnDirection direction,
                                               const NavConfig& config);

/// Executes one command open-loop with exact skid-steer kinematics.
RobotState apply_command(const RobotState& state, const MotionCommand& cmd, const NavConfig& config,
                         const RobotGeometry& geometry = {});

/// Physical consequences injected when a wheel meets an obstacle.
struct ObstacleEffects {
    double footprint_radius_m{0.05};
    double light_kick_deg{8.0};
    double significant_kick_deg{20.0};
    double partial_blur_px{8.0};
    double unstable_blur_px{24.0};
};

struct MissionConfig {
    NavConfig nav;
    actuation::GantryConfig gantry{actuation::GantryConfig::defaults()};
    vision::VisionConfig vision;
    vision::RowDetectionConfig row_detection;
    vision::CameraModel down_camera{vision::CameraModel::downward()};
    vision::CameraModel front_camera{vision::CameraModel::front()};
    vision::GantryCalibration calibration{vision::GantryCalibration::from_camera(vision::CameraModel::downward())};
    RobotGeometry robot;
    kinematics::SuspensionConfig suspension;
    kinematics::TraversalModel traversal;
    ObstacleEffects obstacle_effects;
    std::uint64_t seed{1};
    /// Start pose; defaults to the start of the first row, facing along it.
    std::optional<Pose2D> start;
    /// Match radius, beyond the weed radius, for attributing a detection to a weed.
    double match_margin_m{0.003};
    /// Hard limit on simulated time.
    double max_time_s{36000.0};
};

struct MissionEvent {
    double t{0.0};
    std::string event;
    Vec2 position;
    double heading_deg{0.0};
    std::string detail;
};

/// One laser shot (or pointer mark).
struct ShotRecord {
    double t{0.0};
    int weed_index{-1};        ///< -1 for a detection matching no weed
    Pose2D robot_pose;
    Vec2 detected_px;          ///< detected centroid in the downward image
    Vec2 target_mm;            ///< gantry target from the calibration map
    Vec2 laser_axis_mm;        ///< realized laser axis after settling
    Vec2 weed_mm;              ///< true weed center in the gantry frame
    bool hit{false};
};

struct MissionLog {
    std::vector<MissionEvent> events;
    std::vector<ShotRecord> shots;
    std::vector<NavMode> modes;    ///< every mode entered, in order
    bool aborted{false};
    std::string abort_reason;
    int rows_completed{0};

    std::size_t weeds_total{0};
    std::size_t weeds_detected{0};
    std::size_t weeds_eliminated{0};
    std::size_t false_positives{0};
    std::size_t unreachable{0};

    double total_time_s{0.0};
    double drive_time_s{0.0};   ///< advancing and turning
    double stop_time_s{0.0};    ///< gantry work while stationary
    double row_time_s{0.0};     ///< time spent in following mode, stops included
    double row_distance_m{0.0}; ///< distance advanced in following mode

    double max_heading_error_deg{0.0};
    double max_extra_blur_px{0.0};
    int frames{0};
    bool stuck{false};
    bool crop_contact{false};

    [[nodiscard]] double detection_rate() const;
    [[nodiscard]] double hit_rate() const;
    [[nodiscard]] double weeding_time_s_per_m() const;
    /// t,event,x,y,heading,detail
    void write_csv(std::ostream& os) const;
};

/// Per-frame hook, e.g. for dumping images.
struct FrameObserver {
    virtual ~FrameObserver() = default;
    virtual void on_frame(int index, const vision::RasterImage& down, const vision::RasterImage& front) = 0;
};

/// Full row-following weeding mission. Weeds hit by the laser are flagged
/// eliminated in `world`.
MissionLog run_mission(FieldScenario& world, const MissionConfig& config, FrameObserver* observer = nullptr);

}  // namespace weedbot
