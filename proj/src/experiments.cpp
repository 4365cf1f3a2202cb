#include "weedbot/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>

#include "weedbot/error.hpp"
#include "weedbot/rng.hpp"
#include "weedbot/vision/pipeline.hpp"

namespace weedbot {

LinearFit linear_fit(const std::vector<Vec2>& points)
{
    if (points.size() < 2) {
        throw DegenerateFitError("linear fit needs at least two points");
    }
    const double n = static_cast<double>(points.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& p : points) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
        syy += (p.y - my) * (p.y - my);
    }
    if (sxx == 0.0) {
        throw DegenerateFitError("linear fit needs at least two distinct x values");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy == 0.0) {
        fit.r_squared = 1.0;
        return fit;
    }
    double ss_res = 0.0;
    for (const auto& p : points) {
        const double r = p.y - fit.at(p.x);
        ss_res += r * r;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    return fit;
}

double optimal_speed(const LinearFit& detection, const LinearFit& weeding_time)
{
    const double ds = detection.slope - weeding_time.slope;
    if (ds == 0.0) {
        throw DegenerateFitError("parallel models have no intersection");
    }
    return (weeding_time.intercept - detection.intercept) / ds;
}

SummaryStats summarize(const std::vector<double>& values)
{
    SummaryStats s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    return s;
}

std::size_t Histogram::total() const
{
    std::size_t t = 0;
    for (auto c : counts) {
        t += c;
    }
    return t;
}

Histogram histogram(const std::vector<double>& values, double bin_width)
{
    if (!(bin_width > 0.0)) {
        throw InvalidArgument("histogram bin width must be positive");
    }
    Histogram h;
    h.bin_width = bin_width;
    for (double v : values) {
        if (!(v >= 0.0)) {
            throw InvalidArgument("histogram values must be non-negative");
        }
        const auto bin = static_cast<std::size_t>(std::floor(v / bin_width));
        if (bin >= h.counts.size()) {
            h.counts.resize(bin + 1, 0);
        }
        ++h.counts[bin];
    }
    return h;
}

namespace {

std::uint64_t trial_seed(std::uint64_t seed, int trial)
{
    return trial == 0 ? seed : mix_seed(seed, static_cast<std::uint64_t>(trial));
}

// Runs jobs on up to `parallel` threads; results keep the job order.
template <typename T>
std::vector<T> run_ordered(const std::vector<std::function<T()>>& jobs, int parallel)
{
    std::vector<T> out;
    out.reserve(jobs.size());
    if (parallel <= 1) {
        for (const auto& job : jobs) {
            out.push_back(job());
        }
        return out;
    }
    for (std::size_t start = 0; start < jobs.size(); start += static_cast<std::size_t>(parallel)) {
        std::vector<std::future<T>> batch;
        const std::size_t end = std::min(jobs.size(), start + static_cast<std::size_t>(parallel));
        for (std::size_t i = start; i < end; ++i) {
            batch.push_back(std::async(std::launch::async, jobs[i]));
        }
        for (auto& f : batch) {
            out.push_back(f.get());
        }
    }
    return out;
}

}  // namespace

SweepResult run_speed_sweep(const StudyConfig& config, const std::vector<double>& speeds, int trials)
{
    if (speeds.empty()) {
        throw InvalidArgument("speed sweep needs at least one speed");
    }
    if (trials < 1) {
        throw InvalidArgument("trials must be at least 1");
    }
    std::vector<std::function<SweepRow()>> jobs;
    for (double speed : speeds) {
        if (!(speed > 0.0)) {
            throw InvalidArgument("speeds must be positive");
        }
        for (int t = 0; t < trials; ++t) {
            jobs.emplace_back([&config, speed, t] {
                const std::uint64_t seed = trial_seed(config.seed, t);
                FieldScenario world = generate_scenario(config.scenario, seed);
                MissionConfig mission = config.mission;
                mission.nav.speed_cm_s = speed;
                mission.nav.fire = false;
                mission.seed = seed;
                const MissionLog log = run_mission(world, mission);
                if (log.aborted) {
                    throw std::runtime_error("sweep mission aborted: " + log.abort_reason);
                }
                SweepRow row;
                row.speed_cm_s = speed;
                row.trial = t;
                row.seed = seed;
                row.weeds_total = log.weeds_total;
                row.weeds_detected = log.weeds_detected;
                row.false_positives = log.false_positives;
                row.detection_pct = 100.0 * log.detection_rate();
                row.weeding_time_s_per_m = log.weeding_time_s_per_m();
                row.mission_time_s = log.total_time_s;
                return row;
            });
        }
    }
    SweepResult result;
    result.rows = run_ordered(jobs, config.parallel);

    std::vector<double> distinct;
    std::vector<Vec2> det;
    std::vector<Vec2> time;
    for (const auto& r : result.rows) {
        det.push_back({r.speed_cm_s, r.detection_pct});
        time.push_back({r.speed_cm_s, r.weeding_time_s_per_m});
        if (std::find(distinct.begin(), distinct.end(), r.speed_cm_s) == distinct.end()) {
            distinct.push_back(r.speed_cm_s);
        }
    }
    if (distinct.size() >= 2) {
        result.model.detection = linear_fit(det);
        result.model.weeding_time = linear_fit(time);
        if (result.model.detection.slope != result.model.weeding_time.slope) {
            result.model.optimal_speed_cm_s = optimal_speed(result.model.detection, result.model.weeding_time);
            result.model.has_optimum = true;
        }
    }
    return result;
}

vision::CameraModel secondary_camera(const MissionConfig& mission)
{
    vision::CameraModel cam = mission.down_camera;
    cam.mirrored = true;
    cam.motion_blur_px_per_cmps = 0.0;
    return cam;
}

SpotMeasurement measure_spot(const FieldScenario& world, const Pose2D& robot, const Vec2& laser_axis_mm,
                             const Vec2& weed_world, const MissionConfig& mission, const vision::CameraModel& secondary,
                             std::uint64_t noise_seed)
{
    const auto& down = mission.down_camera;
    RobotState state;
    state.position = robot.position;
    state.heading_rad = robot.heading_rad;
    vision::RenderOptions opts;
    opts.laser_spot_body = down.pixel_to_body(vision::gantry_to_pixel(laser_axis_mm, mission.calibration));
    opts.noise = secondary.pixel_noise_sigma > 0.0;
    const vision::RasterImage img = vision::render_view(world, state, secondary, noise_seed, opts);

    SpotMeasurement m;
    const auto spot = vision::detect_laser_spot(img);
    if (!spot) {
        return m;
    }
    const Vec2 px = vision::mirror_transform(*spot, secondary.height);
    const Vec2 weed_px = down.body_to_pixel(world_to_body(robot, weed_world));
    m.found = true;
    m.ex_mm = (px.x - weed_px.x) * mission.calibration.mm_per_px_u;
    m.ey_mm = (px.y - weed_px.y) * mission.calibration.mm_per_px_v;
    return m;
}

AccuracyReport run_accuracy_study(const StudyConfig& config, double speed_cm_s, double bin_width_mm)
{
    FieldScenario world = generate_scenario(config.scenario, config.seed);
    MissionConfig mission = config.mission;
    mission.nav.speed_cm_s = speed_cm_s;
    mission.nav.fire = true;
    mission.seed = config.seed;
    const MissionLog log = run_mission(world, mission);
    if (log.aborted) {
        throw std::runtime_error("accuracy mission aborted: " + log.abort_reason);
    }

    AccuracyReport rep;
    rep.speed_cm_s = speed_cm_s;
    rep.weeds_total = log.weeds_total;
    rep.weeds_detected = log.weeds_detected;
    rep.weeds_eliminated = log.weeds_eliminated;
    rep.detection_rate = log.detection_rate();
    rep.hit_rate = log.hit_rate();
    rep.mission_time_s = log.total_time_s;

    const vision::CameraModel cam = secondary_camera(mission);
    std::vector<double> ax;
    std::vector<double> ay;
    std::vector<double> ae;
    std::uint64_t k = 0;
    for (const auto& shot : log.shots) {
        if (shot.weed_index < 0) {
            continue;
        }
        const auto m = measure_spot(world, shot.robot_pose, shot.laser_axis_mm,
                                    world.weeds[static_cast<std::size_t>(shot.weed_index)].position, mission, cam,
                                    mix_seed(config.seed, 0x5ec0000 + k++));
        if (!m.found) {
            ++rep.spots_missing;
            continue;
        }
        WeedError e;
        e.weed_index = shot.weed_index;
        e.ex_mm = m.ex_mm;
        e.ey_mm = m.ey_mm;
        e.e_sq_mm2 = e.ex_mm * e.ex_mm + e.ey_mm * e.ey_mm;
        e.e_mm = std::sqrt(e.e_sq_mm2);
        e.hit = shot.hit;
        rep.errors.push_back(e);
        ax.push_back(std::abs(e.ex_mm));
        ay.push_back(std::abs(e.ey_mm));
        ae.push_back(e.e_mm);
    }
    rep.ex = summarize(ax);
    rep.ey = summarize(ay);
    rep.e = summarize(ae);
    rep.hist_ex = histogram(ax, bin_width_mm);
    rep.hist_ey = histogram(ay, bin_width_mm);
    rep.hist_e = histogram(ae, bin_width_mm);
    return rep;
}

std::size_t StabilityReport::consistent_rows() const
{
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const StabilityRow& r) { return r.predicted == r.observed; }));
}

StabilityReport run_stability_study(const StudyConfig& config, const std::vector<Obstacle>& obstacles,
                                    const StabilityConfig& stability)
{
    std::vector<std::function<StabilityRow()>> jobs;
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        jobs.emplace_back([&config, &stability, &obstacles, i] {
            ScenarioSpec spec = config.scenario;
            spec.length_m = stability.row_length_m;
            spec.row_count = 1;
            spec.weed_density_per_m = 0.0;
            spec.obstacles.clear();
            FieldScenario world = generate_scenario(spec, config.seed);
            MissionConfig mission = config.mission;
            const auto& row = world.rows.front();
            const double half_track = mission.robot.track_width_m / 2.0;
            Obstacle o = obstacles[i];
            o.position = row.start + row.direction * stability.obstacle_along_m +
                         Vec2{-row.direction.y, row.direction.x} * half_track;
            world.obstacles = {o};
            mission.nav.speed_cm_s = stability.speed_cm_s;
            mission.nav.max_rows = 1;
            mission.seed = mix_seed(config.seed, i);
            const MissionLog log = run_mission(world, mission);

            StabilityRow r;
            r.obstacle = o;
            r.predicted = kinematics::traversal_outcome(o, mission.suspension, mission.traversal);
            r.max_heading_error_deg = log.max_heading_error_deg;
            r.max_extra_blur_px = log.max_extra_blur_px;
            r.stuck = log.stuck;

            const auto& fx = mission.obstacle_effects;
            const double sd_split = 0.5 * (fx.light_kick_deg + fx.significant_kick_deg);
            using kinematics::Climb;
            using kinematics::ImageEffect;
            using kinematics::NavEffect;
            if (r.max_extra_blur_px >= fx.unstable_blur_px) {
                r.observed.image_effect = ImageEffect::unstable;
            } else if (r.max_extra_blur_px > 0.0) {
                r.observed.image_effect = ImageEffect::partial_distortion;
            }
            if (r.stuck) {
                r.observed.climb = Climb::no;
            } else if (r.max_extra_blur_px > 0.0) {
                r.observed.climb = Climb::partial;
            }
            if (r.stuck || r.max_heading_error_deg >= sd_split) {
                r.observed.nav_effect = NavEffect::significant_deviation;
            } else if (r.max_heading_error_deg > mission.nav.deviation_threshold_deg) {
                r.observed.nav_effect = NavEffect::light_deviation;
            }
            return r;
        });
    }
    StabilityReport rep;
    rep.rows = run_ordered(jobs, config.parallel);
    return rep;
}

std::vector<Obstacle> reference_obstacles()
{
    const auto rock = ObstacleKind::rock;
    const auto organic = ObstacleKind::organic;
    const auto incline = ObstacleKind::incline;
    return {
        {{}, 5, rock},     {{}, 7, rock},     {{}, 8, rock},     {{}, 10, rock},    {{}, 12, rock},
        {{}, 13, rock},    {{}, 14, rock},    {{}, 15, rock},    {{}, 5, organic},  {{}, 10, organic},
        {{}, 15, organic}, {{}, 5, incline},  {{}, 10, incline}, {{}, 15, incline},
    };
}

}  // namespace weedbot
