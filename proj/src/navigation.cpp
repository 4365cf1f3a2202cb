#include "weedbot/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "weedbot/csv.hpp"
#include "weedbot/error.hpp"
#include "weedbot/rng.hpp"

namespace weedbot {

const char* to_string(NavMode mode)
{
    switch (mode) {
    case NavMode::aligning:
        return "aligning";
    case NavMode::following:
        return "following";
    case NavMode::exiting:
        return "exiting";
    case NavMode::turning:
        return "turning";
    case NavMode::done:
        return "done";
    }
    return "?";
}

bool transition_allowed(NavMode from, NavMode to)
{
    if (to == NavMode::done) {
        return from != NavMode::done;
    }
    switch (from) {
    case NavMode::aligning:
        return to == NavMode::following;
    case NavMode::following:
        return to == NavMode::exiting;
    case NavMode::exiting:
        return to == NavMode::turning;
    case NavMode::turning:
        return to == NavMode::aligning;
    case NavMode::done:
        return false;
    }
    return false;
}

std::vector<MotionCommand> AlignCommand::to_commands() const
{
    std::vector<MotionCommand> out;
    if (turn_deg != 0.0) {
        out.push_back(MotionCommand::turn(turn_deg));
    }
    if (lateral_mm != 0.0) {
        const double side = lateral_mm > 0.0 ? -90.0 : 90.0;
        out.push_back(MotionCommand::turn(side));
        out.push_back(MotionCommand::advance(std::abs(lateral_mm) / 1000.0));
        out.push_back(MotionCommand::turn(-side));
    }
    return out;
}

AlignCommand align_to_row(const vision::DetectedRow& row, double mm_per_px)
{
    if (!(mm_per_px > 0.0)) {
        throw InvalidArgument("mm_per_px must be positive");
    }
    return {row.angle_deg, row.lateral_offset_px() * mm_per_px};
}

RowEstimate row_in_body(const vision::DetectedRow& row, const vision::CameraModel& camera)
{
    const double th = deg_to_rad(row.theta_deg);
    const Vec2 n{std::cos(th), std::sin(th)};
    const Vec2 d{-n.y, n.x};
    const Vec2 c{(camera.width - 1) / 2.0, (camera.height - 1) / 2.0};
    const Vec2 p0 = c + n * row.distance_from_center_px;
    const Vec2 a = camera.pixel_to_body(p0);
    const Vec2 b = camera.pixel_to_body(p0 + d * 10.0);
    Vec2 u = b - a;
    u = u * (1.0 / u.norm());
    if (u.x < 0.0) {
        u = u * -1.0;
    }
    RowEstimate est;
    est.angle_deg = rad_to_deg(std::atan2(u.y, u.x));
    // Foot of the perpendicular from the robot center to the line.
    const Vec2 foot = a - u * a.dot(u);
    const Vec2 right_after_turn{u.y, -u.x};
    est.lateral_m = foot.dot(right_after_turn);
    return est;
}

AlignCommand align_to_row(const RowEstimate& row)
{
    return {row.angle_deg, row.lateral_m * 1000.0};
}

MotionCommand follow_step(NavState& state, const vision::DetectedRow& row, const NavConfig& config)
{
    if (state.mode != NavMode::following) {
        throw InvalidArgument("follow_step requires following mode");
    }
    state.target_row = row;
    state.heading_error_deg = -row.angle_deg;
    if (std::abs(state.heading_error_deg) > config.deviation_threshold_deg) {
        return MotionCommand::turn(-state.heading_error_deg);
    }
    return MotionCommand::advance(config.speed_cm_s / 100.0 * config.frame_period_s);
}

std::vector<MotionCommand> end_of_row_maneuver(double inter_row_spacing_m, TurnDirection direction,
                                               const NavConfig& config)
{
    if (inter_row_spacing_m < 0.0) {
        throw InvalidArgument("inter-row spacing must be non-negative");
    }
    const double turn = direction == TurnDirection::left ? 90.0 : -90.0;
    return {MotionCommand::advance(config.exit_distance_m), MotionCommand::turn(turn),
            MotionCommand::advance(inter_row_spacing_m), MotionCommand::turn(turn)};
}

RobotState apply_command(const RobotState& state, const MotionCommand& cmd, const NavConfig& config,
                         const RobotGeometry& geometry)
{
    if (cmd.value == 0.0) {
        return state;
    }
    RobotState s = state;
    if (cmd.kind == MotionCommand::Kind::turn) {
        const double omega = deg_to_rad(config.turn_rate_deg_s);
        const double side = omega * geometry.track_width_m / 2.0 * 100.0;
        const double dt = std::abs(cmd.value) / config.turn_rate_deg_s;
        const WheelSpeeds w = cmd.value > 0.0 ? WheelSpeeds{-side, side} : WheelSpeeds{side, -side};
        s = advance(s, w, dt, geometry);
    } else {
        const double v = std::copysign(config.speed_cm_s, cmd.value);
        const double dt = std::abs(cmd.value) * 100.0 / config.speed_cm_s;
        s = advance(s, {v, v}, dt, geometry);
    }
    s.linear_speed_cm_s = 0.0;
    return s;
}

double MissionLog::detection_rate() const
{
    return weeds_total == 0 ? 0.0 : static_cast<double>(weeds_detected) / static_cast<double>(weeds_total);
}

double MissionLog::hit_rate() const
{
    return weeds_detected == 0 ? 0.0 : static_cast<double>(weeds_eliminated) / static_cast<double>(weeds_detected);
}

double MissionLog::weeding_time_s_per_m() const
{
    return row_distance_m > 0.0 ? row_time_s / row_distance_m : 0.0;
}

void MissionLog::write_csv(std::ostream& os) const
{
    csv::write_row(os, {"t", "event", "x", "y", "heading", "detail"});
    for (const auto& e : events) {
        csv::write_row(os, {csv::num(e.t, 3), e.event, csv::num(e.position.x, 4), csv::num(e.position.y, 4),
                            csv::num(e.heading_deg, 3), e.detail});
    }
}

namespace {

struct Target {
    Vec2 pixel;
    Vec2 world;
};

class Mission {
public:
    Mission(FieldScenario& world, const MissionConfig& config, FrameObserver* observer)
        : world_(world), cfg_(config), nav_(config.nav), observer_(observer),
          gantry_rng_(mix_seed(config.seed, 0x6a27)), detected_(world.weeds.size(), 0)
    {
        if (world.rows.empty()) {
            throw InvalidArgument("mission needs at least one crop row");
        }
        if (!(nav_.speed_cm_s > 0.0) || !(nav_.frame_period_s > 0.0) || !(nav_.turn_rate_deg_s > 0.0)) {
            throw InvalidArgument("speed, frame period and turn rate must be positive");
        }
        if (!(nav_.deviation_threshold_deg > 0.0)) {
            throw InvalidArgument("deviation threshold must be positive");
        }
        max_rows_ = nav_.max_rows > 0 ? nav_.max_rows : static_cast<int>(world.rows.size());
        for (const auto& o : world.obstacles) {
            obstacles_.push_back({o, kinematics::traversal_outcome(o, cfg_.suspension, cfg_.traversal), false});
        }
        for (const auto& row : world.rows) {
            for (const auto& c : row.plant_centers()) {
                plants_.push_back({c, row.plant_radius_m});
            }
        }
        if (cfg_.start) {
            robot_.position = cfg_.start->position;
            robot_.heading_rad = cfg_.start->heading_rad;
        } else {
            const auto& r = world.rows.front();
            robot_.position = r.start;
            robot_.heading_rad = std::atan2(r.direction.y, r.direction.x);
        }
        gantry_ = actuation::home(actuation::GantryState{});
        turn_left_ = nav_.first_turn_left;
        log_.weeds_total = world.weeds.size();
    }

    MissionLog run()
    {
        log("start", "");
        enter(NavMode::aligning);
        while (state_.mode != NavMode::done) {
            if (robot_.clock_s > cfg_.max_time_s) {
                abort("time limit reached");
                break;
            }
            switch (state_.mode) {
            case NavMode::aligning:
                do_aligning();
                break;
            case NavMode::following:
                do_following();
                break;
            case NavMode::exiting:
                do_exiting();
                break;
            case NavMode::turning:
                do_turning();
                break;
            case NavMode::done:
                break;
            }
        }
        log_.rows_completed = state_.rows_completed;
        log_.total_time_s = robot_.clock_s;
        log_.weeds_detected = static_cast<std::size_t>(std::count(detected_.begin(), detected_.end(), 1));
        log_.weeds_eliminated = world_.eliminated_count();
        if (!nav_.fire) {
            log_.weeds_eliminated = marked_;
        }
        log("done", log_.aborted ? log_.abort_reason : "ok");
        return std::move(log_);
    }

private:
    struct ObstacleTrack {
        Obstacle obstacle;
        kinematics::TraversalOutcome outcome;
        bool kicked{false};
    };
    struct Plant {
        Vec2 center;
        double radius;
    };

    void log(const std::string& event, const std::string& detail)
    {
        log_.events.push_back({robot_.clock_s, event, robot_.position, rad_to_deg(robot_.heading_rad), detail});
    }

    void enter(NavMode mode)
    {
        if (!log_.modes.empty() && !transition_allowed(state_.mode, mode)) {
            throw InvalidArgument(std::string("illegal mode transition ") + to_string(state_.mode) + " -> " +
                                  to_string(mode));
        }
        state_.mode = mode;
        log_.modes.push_back(mode);
        log("mode", to_string(mode));
    }

    void abort(const std::string& reason)
    {
        log_.aborted = true;
        log_.abort_reason = reason;
        log("abort", reason);
        enter(NavMode::done);
    }

    bool active() const { return state_.mode != NavMode::done; }

    void check_crops()
    {
        if (log_.crop_contact) {
            return;
        }
        const Pose2D pose = robot_.pose();
        for (const auto& w : cfg_.robot.wheel_contacts()) {
            const Vec2 p = body_to_world(pose, w);
            for (const auto& pl : plants_) {
                if ((p - pl.center).norm() < pl.radius + cfg_.robot.wheel_half_width_m) {
                    log_.crop_contact = true;
                    log("crop_contact", csv::num(pl.center.x, 3) + " " + csv::num(pl.center.y, 3));
                    return;
                }
            }
        }
    }

    bool in_row_work() const { return state_.mode == NavMode::following || state_.mode == NavMode::exiting; }

    void add_time(double dt, bool driving)
    {
        robot_.clock_s += dt;
        if (driving) {
            log_.drive_time_s += dt;
        } else {
            log_.stop_time_s += dt;
        }
        if (in_row_work()) {
            log_.row_time_s += dt;
        }
    }

    void execute(const MotionCommand& cmd)
    {
        if (cmd.kind == MotionCommand::Kind::advance) {
            drive(cmd.value);
            return;
        }
        const RobotState before = robot_;
        robot_ = apply_command(robot_, cmd, nav_, cfg_.robot);
        const double dt = robot_.clock_s - before.clock_s;
        robot_.clock_s = before.clock_s;
        add_time(dt, true);
        check_crops();
    }

    // Forward motion in frame-period chunks with obstacle interaction. Returns
    // false when the mission was aborted.
    bool drive_chunk(double meters)
    {
        const double v = nav_.speed_cm_s;
        const double dt = meters * 100.0 / v;
        RobotState next = advance(robot_, {v, v}, dt, cfg_.robot);
        next.clock_s = robot_.clock_s;

        extra_blur_ = 0.0;
        bool blocked = false;
        const auto contacts = cfg_.robot.wheel_contacts();
        for (auto& track : obstacles_) {
            int side = 0;
            for (const auto& w : contacts) {
                const Vec2 p = body_to_world(next.pose(), w);
                if ((p - track.obstacle.position).norm() <=
                    cfg_.obstacle_effects.footprint_radius_m + cfg_.robot.wheel_half_width_m) {
                    side = w.y > 0.0 ? 1 : -1;
                    break;
                }
            }
            if (side == 0) {
                continue;
            }
            const auto& fx = cfg_.obstacle_effects;
            const auto& out = track.outcome;
            if (!track.kicked) {
                track.kicked = true;
                log("obstacle", std::string(kinematics::short_code(out.climb)) + "/" +
                                    kinematics::short_code(out.nav_effect) + "/" +
                                    kinematics::short_code(out.image_effect));
                double kick = 0.0;
                if (out.nav_effect == kinematics::NavEffect::light_deviation) {
                    kick = fx.light_kick_deg;
                } else if (out.nav_effect == kinematics::NavEffect::significant_deviation) {
                    kick = fx.significant_kick_deg;
                }
                // A lifted left wheel yaws the chassis to the right, and vice versa.
                next.heading_rad = normalize_angle(next.heading_rad - side * deg_to_rad(kick));
                robot_.heading_rad = normalize_angle(robot_.heading_rad - side * deg_to_rad(kick));
            }
            if (out.image_effect == kinematics::ImageEffect::partial_distortion) {
                extra_blur_ = std::max(extra_blur_, fx.partial_blur_px);
            } else if (out.image_effect == kinematics::ImageEffect::unstable) {
                extra_blur_ = std::max(extra_blur_, fx.unstable_blur_px);
            }
            if (out.climb == kinematics::Climb::no) {
                blocked = true;
            }
        }
        log_.max_extra_blur_px = std::max(log_.max_extra_blur_px, extra_blur_);

        if (blocked) {
            robot_.linear_speed_cm_s = 0.0;
            add_time(dt, true);
            stuck_time_ += dt;
            if (stuck_time_ >= nav_.stuck_timeout_s) {
                log_.stuck = true;
                log("stuck", "no progress for " + csv::num(stuck_time_, 1) + " s");
                abort("stuck");
                return false;
            }
            return true;
        }
        stuck_time_ = 0.0;
        if (in_row_work()) {
            log_.row_distance_m += meters;
        }
        robot_ = next;
        robot_.linear_speed_cm_s = v;
        add_time(dt, true);
        check_crops();
        return true;
    }

    void drive(double meters)
    {
        const double step = nav_.speed_cm_s / 100.0 * nav_.frame_period_s;
        double left = meters;
        while (left > 1e-12 && active()) {
            const double d = std::min(step, left);
            drive_chunk(d);
            left -= d;
        }
    }

    std::optional<vision::DetectedRow> look_ahead()
    {
        front_ = vision::render_view(world_, robot_, cfg_.front_camera, mix_seed(cfg_.seed, 0x10000 + frame_));
        return vision::select_row(vision::detect_rows(front_, cfg_.row_detection));
    }

    void process_weeds()
    {
        vision::RenderOptions opts;
        opts.extra_blur_px = extra_blur_;
        const auto& cam = cfg_.down_camera;
        const vision::RasterImage img = vision::render_view(world_, robot_, cam, mix_seed(cfg_.seed, frame_), opts);
        ++frame_;
        ++log_.frames;
        if (observer_ != nullptr) {
            observer_->on_frame(frame_ - 1, img, front_);
        }
        const auto det = vision::detect_weeds(img, cfg_.vision);
        const Pose2D pose = robot_.pose();
        std::vector<Target> fresh;
        for (const auto& c : det.centroids_px) {
            const Vec2 w = body_to_world(pose, cam.pixel_to_body(c));
            const bool known = std::any_of(known_.begin(), known_.end(), [&](const Vec2& k) {
                return (k - w).norm() < nav_.dedup_radius_m;
            });
            if (!known) {
                fresh.push_back({c, w});
                known_.push_back(w);
            }
        }
        if (fresh.empty()) {
            return;
        }
        std::sort(fresh.begin(), fresh.end(), [](const Target& a, const Target& b) {
            return a.pixel.x != b.pixel.x ? a.pixel.x < b.pixel.x : a.pixel.y < b.pixel.y;
        });
        const double speed = robot_.linear_speed_cm_s;
        robot_.linear_speed_cm_s = 0.0;
        log("stop", std::to_string(fresh.size()) + " weeds");
        for (const auto& t : fresh) {
            const double g0 = gantry_.clock_s;
            treat(t);
            add_time(gantry_.clock_s - g0, false);
        }
        if (nav_.park_after_stop) {
            const double g0 = gantry_.clock_s;
            gantry_ = actuation::execute_plan(cfg_.gantry, gantry_, actuation::plan_move(cfg_.gantry, gantry_, {}));
            add_time(gantry_.clock_s - g0, false);
        }
        add_time(nav_.stop_overhead_s, false);
        robot_.linear_speed_cm_s = speed;
        log("resume", "");
    }

    int match_weed(const Vec2& w) const
    {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < world_.weeds.size(); ++i) {
            const auto& weed = world_.weeds[i];
            const double d = (weed.position - w).norm();
            if (d <= weed.stem_radius_m + cfg_.match_margin_m && d < best_d) {
                best = static_cast<int>(i);
                best_d = d;
            }
        }
        return best;
    }

    void treat(const Target& t)
    {
        const double g0 = gantry_.clock_s;
        const auto& g = cfg_.gantry;
        const auto& cam = cfg_.down_camera;
        const Vec2 target = vision::pixel_to_gantry(t.pixel, cfg_.calibration);
        const int idx = match_weed(t.world);
        if (idx < 0) {
            ++log_.false_positives;
        } else {
            detected_[idx] = 1;
        }

        actuation::StepPlan plan;
        try {
            plan = actuation::plan_move(g, gantry_, {target.x, target.y, 0.0});
        } catch (const OutOfRangeError& e) {
            ++log_.unreachable;
            log("unreachable", "weed=" + std::to_string(idx) + " axis=" + e.axis());
            return;
        }
        gantry_ = actuation::execute_plan(g, gantry_, plan);
        gantry_ = actuation::settle(g, gantry_, gantry_rng_);

        actuation::TargetGeometry geom;
        Weed ground;
        Weed* weed = &ground;
        if (idx >= 0) {
            weed = &world_.weeds[idx];
            const Vec2 px = cam.body_to_pixel(world_to_body(robot_.pose(), weed->position));
            geom.center_mm = vision::pixel_to_gantry(px, cfg_.calibration);
            geom.radius_mm = weed->stem_radius_m * 1000.0;
            geom.height_mm = weed->height_m * 1000.0;
        } else {
            geom.center_mm = target;
            geom.radius_mm = 0.0;
            geom.height_mm = 0.0;
        }

        const auto descent =
            actuation::descend_to_weed(g, gantry_, geom, g.ultrasonic.noise_sigma_mm, gantry_rng_);
        gantry_ = descent.state;
        if (descent.detected) {
            const bool was_eliminated = weed->eliminated;
            const auto shot = actuation::fire(g, gantry_, geom, *weed, nav_.fire);
            gantry_ = shot.state;
            const bool hit = idx >= 0 && shot.hit;
            if (hit && !nav_.fire && !was_eliminated) {
                ++marked_;
            }
            ShotRecord rec;
            rec.t = robot_.clock_s + (gantry_.clock_s - g0);
            rec.weed_index = idx;
            rec.robot_pose = robot_.pose();
            rec.detected_px = t.pixel;
            rec.target_mm = target;
            rec.laser_axis_mm = gantry_.laser_axis_mm();
            rec.weed_mm = geom.center_mm;
            rec.hit = hit;
            log_.shots.push_back(rec);
            log("shot", "weed=" + std::to_string(idx) + " hit=" + (hit ? "1" : "0"));
        } else {
            log("no_echo", "weed=" + std::to_string(idx));
        }
        const auto retract = actuation::plan_move(g, gantry_, {gantry_.position.x, gantry_.position.y, 0.0});
        gantry_ = actuation::execute_plan(g, gantry_, retract);
    }

    void do_aligning()
    {
        const auto row = look_ahead();
        if (!row) {
            if (searched_ >= nav_.search_distance_m) {
                log("no_row", "search distance exhausted");
                enter(NavMode::done);
                return;
            }
            const double step = nav_.speed_cm_s / 100.0 * nav_.frame_period_s;
            drive_chunk(step);
            searched_ += step;
            return;
        }
        searched_ = 0.0;
        remember_spacing(*row);
        AlignCommand cmd = align_to_row(row_in_body(*row, cfg_.front_camera));
        if (std::abs(cmd.lateral_mm) < nav_.align_tolerance_m * 1000.0) {
            cmd.lateral_mm = 0.0;
        }
        log("align", "turn=" + csv::num(cmd.turn_deg, 2) + " lateral_mm=" + csv::num(cmd.lateral_mm, 1));
        for (const auto& c : cmd.to_commands()) {
            execute(c);
        }
        state_.target_row = row;
        enter(NavMode::following);
    }

    void remember_spacing(const vision::DetectedRow& row)
    {
        if (row.inter_row_spacing_px > 0.0) {
            measured_spacing_m_ = row.inter_row_spacing_px * cfg_.front_camera.meters_per_px_u();
        }
    }

    void do_following()
    {
        process_weeds();
        if (!active()) {
            return;
        }
        const auto row = look_ahead();
        if (!row) {
            enter(NavMode::exiting);
            return;
        }
        remember_spacing(*row);
        const MotionCommand cmd = follow_step(state_, *row, nav_);
        log_.max_heading_error_deg = std::max(log_.max_heading_error_deg, std::abs(state_.heading_error_deg));
        if (cmd.kind == MotionCommand::Kind::turn) {
            log("correct", "turn=" + csv::num(cmd.value, 2));
            execute(cmd);
        } else {
            drive_chunk(cmd.value);
        }
    }

    void do_exiting()
    {
        const double step = nav_.speed_cm_s / 100.0 * nav_.frame_period_s;
        double left = nav_.exit_distance_m;
        while (left > 1e-12 && active()) {
            process_weeds();
            const double d = std::min(step, left);
            if (!drive_chunk(d)) {
                return;
            }
            left -= d;
        }
        if (!active()) {
            return;
        }
        ++state_.rows_completed;
        log("row_done", std::to_string(state_.rows_completed));
        if (state_.rows_completed >= max_rows_) {
            enter(NavMode::done);
            return;
        }
        enter(NavMode::turning);
    }

    void do_turning()
    {
        const double spacing = nav_.inter_row_spacing_m > 0.0 ? nav_.inter_row_spacing_m : measured_spacing_m_;
        if (!(spacing > 0.0)) {
            abort("inter-row spacing unknown");
            return;
        }
        const auto seq =
            end_of_row_maneuver(spacing, turn_left_ ? TurnDirection::left : TurnDirection::right, nav_);
        log("maneuver", std::string(turn_left_ ? "left" : "right") + " spacing=" + csv::num(spacing, 3));
        // The exit run was already driven in exiting mode with the camera on.
        for (std::size_t i = 1; i < seq.size() && active(); ++i) {
            execute(seq[i]);
        }
        turn_left_ = !turn_left_;
        if (active()) {
            enter(NavMode::aligning);
        }
    }

    FieldScenario& world_;
    const MissionConfig& cfg_;
    const NavConfig& nav_;
    FrameObserver* observer_;
    Rng gantry_rng_;
    std::vector<char> detected_;
    std::vector<ObstacleTrack> obstacles_;
    std::vector<Plant> plants_;
    std::vector<Vec2> known_;
    RobotState robot_;
    actuation::GantryState gantry_;
    NavState state_;
    MissionLog log_;
    vision::RasterImage front_;
    int max_rows_{1};
    int frame_{0};
    std::size_t marked_{0};
    double extra_blur_{0.0};
    double stuck_time_{0.0};
    double searched_{0.0};
    double measured_spacing_m_{0.0};
    bool turn_left_{true};
};

}  // namespace

MissionLog run_mission(FieldScenario& world, const MissionConfig& config, FrameObserver* observer)
{
    return Mission(world, config, observer).run();
}

}  // namespace weedbot
