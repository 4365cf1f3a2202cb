#include "weedbot/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "weedbot/config.hpp"
#include "weedbot/csv.hpp"
#include "weedbot/error.hpp"
#include "weedbot/report.hpp"
#include "weedbot/vision/contours.hpp"
#include "weedbot/vision/kernels.hpp"
#include "weedbot/vision/pipeline.hpp"
#include "weedbot/vision/pnm.hpp"
#include "weedbot/vision/render.hpp"

namespace weedbot::cli {

namespace {

namespace fs = std::filesystem;
using csv::num;

/// Flags shared by the run-style subcommands. Unset flags leave the file values alone.
struct CommonFlags {
    std::string config;
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> speed;
    std::optional<std::string> speeds;
    std::optional<int> trials;
    std::optional<int> parallel;
    bool dump_frames{false};
};

void add_config_flags(CLI::App* app, CommonFlags& f)
{
    app->add_option("--config", f.config, "TOML config file (see config/default.toml)")->check(CLI::ExistingFile);
    app->add_option("--scenario", f.scenario, "TOML file with scenario overrides, applied after --config")
        ->check(CLI::ExistingFile);
    app->add_option("--seed", f.seed, "Global seed");
}

config::RunConfig resolve(const CommonFlags& f)
{
    config::RunConfig cfg;
    if (!f.config.empty()) {
        config::apply(config::load_toml(f.config), cfg);
    }
    if (!f.scenario.empty()) {
        config::apply(config::load_toml(f.scenario), cfg);
    }
    if (f.seed) {
        cfg.seed = *f.seed;
    }
    if (f.out) {
        cfg.out = *f.out;
    }
    if (f.speed) {
        cfg.mission.nav.speed_cm_s = *f.speed;
        cfg.experiment.accuracy_speed_cm_s = *f.speed;
    }
    if (f.speeds) {
        cfg.experiment.speeds = config::parse_number_list(*f.speeds);
    }
    if (f.trials) {
        cfg.experiment.trials = *f.trials;
    }
    if (f.parallel) {
        cfg.experiment.parallel = *f.parallel;
    }
    cfg.mission.seed = cfg.seed;
    return cfg;
}

Vec3 parse_point(const std::string& text)
{
    const auto v = config::parse_number_list(text);
    if (v.size() != 3) {
        throw InvalidArgument("expected x,y,z but got '" + text + "'");
    }
    return {v[0], v[1], v[2]};
}

class FrameDumper : public FrameObserver {
public:
    explicit FrameDumper(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void on_frame(int index, const vision::RasterImage& down, const vision::RasterImage& front) override
    {
        char name[32];
        std::snprintf(name, sizeof name, "%05d", index);
        vision::write_pnm((dir_ / ("down_" + std::string(name) + ".ppm")).string(), down);
        vision::write_pnm((dir_ / ("front_" + std::string(name) + ".ppm")).string(), front);
    }

private:
    fs::path dir_;
};

int cmd_kinematics(const config::RunConfig& cfg, std::ostream& out)
{
    const auto report = kinematics::max_wheel_lift(cfg.mission.suspension);
    csv::write_row(out, {"path", "theta3_deg", "d_m_mm", "max_lift_mm", "max_obstacle_cm"});
    const auto row = [&out](const char* name, const kinematics::SuspensionPose& p) {
        csv::write_row(out, {name, num(p.theta3, 4), num(p.d_m, 4), num(p.max_lift_mm, 4),
                             num(p.max_lift_mm / 10.0, 2)});
    };
    row("formula", report.formula);
    row("reference", report.reference);
    return success;
}

int cmd_gantry(const config::RunConfig& cfg, const std::string& from, const std::string& to, std::ostream& out)
{
    const auto& g = cfg.mission.gantry;
    actuation::GantryState state = actuation::home(actuation::GantryState{});
    state = actuation::execute_plan(g, state, actuation::plan_move(g, state, parse_point(from)));
    const auto plan = actuation::plan_move(g, state, parse_point(to));
    csv::write_row(out, {"axis", "steps", "realized_mm", "residual_mm", "resolution_mm"});
    const char* names[3] = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i) {
        const auto k = static_cast<std::size_t>(i);
        csv::write_row(out, {names[i], std::to_string(plan.steps[k]), num(plan.realized_mm[k], 6),
                             num(plan.residual_mm[k], 6), num(actuation::axis_resolution(g.axis(i)), 6)});
    }
    csv::write_row(out, {"y_motor_a", std::to_string(plan.y_motor_steps[0]), "", "", ""});
    csv::write_row(out, {"y_motor_b", std::to_string(plan.y_motor_steps[1]), "", "", ""});
    csv::write_row(out, {"duration_s", num(plan.duration_s, 6), "", "", ""});
    return success;
}

void write_contours(std::ostream& os, const std::vector<vision::Contour>& contours)
{
    csv::write_row(os, {"index", "class", "area_px2", "perimeter_px", "centroid_x", "centroid_y"});
    for (std::size_t i = 0; i < contours.size(); ++i) {
        const auto& c = contours[i];
        csv::write_row(os, {std::to_string(i), vision::to_string(c.cls), num(c.area_px2, 3), num(c.perimeter_px, 3),
                            num(c.centroid.x, 3), num(c.centroid.y, 3)});
    }
}

int cmd_vision(const config::RunConfig& cfg, const std::string& in, const std::string& stage, const std::string& dest,
               std::ostream& out)
{
    const auto& v = cfg.mission.vision;
    const vision::RasterImage rgb = vision::read_pnm(in);
    const auto save = [&](const vision::RasterImage& img) {
        if (dest.empty()) {
            vision::write_pnm(out, img);
        } else {
            vision::write_pnm(dest, img);
        }
        return success;
    };
    std::ofstream file;
    std::ostream* text = &out;
    const auto open_text = [&]() {
        if (!dest.empty()) {
            file.open(dest, std::ios::binary);
            if (!file) {
                throw std::runtime_error("cannot write " + dest);
            }
            text = &file;
        }
    };
    if (stage == "gray") {
        return save(vision::to_gray(rgb));
    }
    const auto hsv = vision::rgb_to_hsv(rgb);
    if (stage == "hsv") {
        return save(hsv);
    }
    const auto mask = vision::hsv_threshold(hsv, v.green_lo, v.green_hi);
    if (stage == "mask") {
        return save(mask);
    }
    const auto blurred = vision::gaussian_blur(mask, v.blur_sigma, v.blur_kernel);
    if (stage == "blur") {
        return save(blurred);
    }
    const auto edges = vision::canny(blurred, v.canny_low, v.canny_high);
    if (stage == "canny") {
        return save(edges);
    }
    const auto closed = vision::close(edges, v.close_kernel);
    if (stage == "closed") {
        return save(closed);
    }
    if (stage == "contours") {
        auto contours = vision::find_contours(closed);
        vision::classify_contours(contours, v.classifier);
        open_text();
        write_contours(*text, contours);
        return success;
    }
    if (stage == "weeds") {
        const auto det = vision::detect_weeds(rgb, v);
        open_text();
        csv::write_row(*text, {"index", "x_px", "y_px"});
        for (std::size_t i = 0; i < det.centroids_px.size(); ++i) {
            csv::write_row(*text, {std::to_string(i), num(det.centroids_px[i].x, 3), num(det.centroids_px[i].y, 3)});
        }
        return success;
    }
    if (stage == "rows") {
        const auto rows = vision::detect_rows(rgb, cfg.mission.row_detection);
        open_text();
        csv::write_row(*text, {"index", "angle_deg", "offset_px", "votes"});
        for (std::size_t i = 0; i < rows.size(); ++i) {
            csv::write_row(*text, {std::to_string(i), num(rows[i].angle_deg, 4), num(rows[i].lateral_offset_px(), 3),
                                   std::to_string(rows[i].votes)});
        }
        return success;
    }
    if (stage == "spot") {
        const auto spot = vision::detect_laser_spot(rgb);
        open_text();
        csv::write_row(*text, {"found", "x_px", "y_px"});
        csv::write_row(*text, {spot ? "1" : "0", spot ? num(spot->x, 3) : "", spot ? num(spot->y, 3) : ""});
        return success;
    }
    throw InvalidArgument("unknown stage '" + stage + "'");
}

int cmd_mission(const config::RunConfig& cfg, const std::string& log_path, bool dump_frames, std::ostream& out)
{
    FieldScenario world = generate_scenario(cfg.world, cfg.seed);
    std::optional<FrameDumper> dumper;
    if (dump_frames) {
        dumper.emplace(fs::path(cfg.out) / "frames");
    }
    const MissionLog log = run_mission(world, cfg.mission, dumper ? &*dumper : nullptr);
    if (!log_path.empty()) {
        const fs::path p(log_path);
        if (p.has_parent_path()) {
            fs::create_directories(p.parent_path());
        }
        std::ofstream f(p, std::ios::binary);
        if (!f) {
            throw std::runtime_error("cannot write " + log_path);
        }
        log.write_csv(f);
    }
    csv::write_row(out, {"metric", "value"});
    csv::write_row(out, {"speed_cm_s", num(cfg.mission.nav.speed_cm_s, 3)});
    csv::write_row(out, {"rows_completed", std::to_string(log.rows_completed)});
    csv::write_row(out, {"weeds_total", std::to_string(log.weeds_total)});
    csv::write_row(out, {"weeds_detected", std::to_string(log.weeds_detected)});
    csv::write_row(out, {"weeds_eliminated", std::to_string(log.weeds_eliminated)});
    csv::write_row(out, {"false_positives", std::to_string(log.false_positives)});
    csv::write_row(out, {"detection_rate", num(log.detection_rate(), 6)});
    csv::write_row(out, {"hit_rate", num(log.hit_rate(), 6)});
    csv::write_row(out, {"weeding_time_s_per_m", num(log.weeding_time_s_per_m(), 4)});
    csv::write_row(out, {"total_time_s", num(log.total_time_s, 3)});
    csv::write_row(out, {"aborted", log.aborted ? log.abort_reason : ""});
    return log.aborted ? runtime_failure : success;
}

int cmd_render(const config::RunConfig& cfg, double x, double y, double heading_deg, const std::string& camera,
               std::ostream& out)
{
    FieldScenario world = generate_scenario(cfg.world, cfg.seed);
    RobotState state;
    state.position = {x, y};
    state.heading_rad = heading_deg * kPi / 180.0;
    state.linear_speed_cm_s = cfg.mission.nav.speed_cm_s;
    vision::CameraModel cam;
    if (camera == "down") {
        cam = cfg.mission.down_camera;
    } else if (camera == "front") {
        cam = cfg.mission.front_camera;
    } else {
        throw InvalidArgument("camera must be down or front");
    }
    const auto img = vision::render_view(world, state, cam, cfg.seed);
    const fs::path p = fs::path(cfg.out);
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    vision::write_pnm(p.string(), img);
    out << "wrote " << p.string() << '\n';
    return success;
}

void print_sweep(const SweepResult& r, std::ostream& out)
{
    for (const auto& row : r.rows) {
        out << "speed " << num(row.speed_cm_s, 1) << " cm/s  trial " << row.trial << "  detection "
            << num(row.detection_pct, 2) << " %  weeding time " << num(row.weeding_time_s_per_m, 2) << " s/m\n";
    }
    const auto& m = r.model;
    out << "detection fit: y = " << num(m.detection.slope, 4) << " x + " << num(m.detection.intercept, 3)
        << "  R2 " << num(m.detection.r_squared, 4) << '\n';
    out << "weeding time fit: y = " << num(m.weeding_time.slope, 4) << " x + " << num(m.weeding_time.intercept, 3)
        << "  R2 " << num(m.weeding_time.r_squared, 4) << '\n';
    if (m.has_optimum) {
        out << "optimal speed (fit intersection): " << num(m.optimal_speed_cm_s, 2) << " cm/s\n";
    }
}

void print_accuracy(const AccuracyReport& r, std::ostream& out)
{
    out << "speed " << num(r.speed_cm_s, 1) << " cm/s\n";
    out << "detection rate " << num(100.0 * r.detection_rate, 2) << " %  (" << r.weeds_detected << "/"
        << r.weeds_total << ")\n";
    out << "hit rate " << num(100.0 * r.hit_rate, 2) << " %  (" << r.weeds_eliminated << "/" << r.weeds_detected
        << ")\n";
    out << "mean |ex| " << num(r.ex.mean, 3) << " mm  std " << num(r.ex.stddev, 3) << '\n';
    out << "mean |ey| " << num(r.ey.mean, 3) << " mm  std " << num(r.ey.stddev, 3) << '\n';
    out << "mean e " << num(r.e.mean, 3) << " mm  std " << num(r.e.stddev, 3) << '\n';
}

void print_stability(const StabilityReport& r, std::ostream& out)
{
    for (const auto& row : r.rows) {
        out << to_string(row.obstacle.kind) << ' ' << num(row.obstacle.height_cm, 1) << " cm: predicted "
            << kinematics::short_code(row.predicted.climb) << '/' << kinematics::short_code(row.predicted.nav_effect)
            << '/' << kinematics::short_code(row.predicted.image_effect) << "  observed "
            << kinematics::short_code(row.observed.climb) << '/' << kinematics::short_code(row.observed.nav_effect)
            << '/' << kinematics::short_code(row.observed.image_effect) << '\n';
    }
    out << r.consistent_rows() << "/" << r.rows.size() << " consistent\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Laser weeding robot simulator and experiment harness", "weedbot"};
    app.require_subcommand(1);
    app.fallthrough(false);

    CommonFlags f;
    std::string from;
    std::string to;
    std::string in;
    std::string stage;
    std::string log_path;
    std::string vision_out;
    double rx = 0.0;
    double ry = 0.0;
    double rheading = 0.0;
    std::string camera{"down"};

    auto* kin = app.add_subcommand("kinematics", "Suspension kinematics");
    auto* kin_report = kin->add_subcommand("report", "Print theta3, d_m and max lift for both paths");
    kin->require_subcommand(1);
    add_config_flags(kin_report, f);

    auto* gantry = app.add_subcommand("gantry", "Gantry step planning");
    auto* gantry_plan = gantry->add_subcommand("plan", "Print the step plan between two points as CSV");
    gantry->require_subcommand(1);
    add_config_flags(gantry_plan, f);
    gantry_plan->add_option("--from", from, "Start point x,y,z in mm")->default_str("0,0,0");
    gantry_plan->add_option("--to", to, "Target point x,y,z in mm")->required();
    from = "0,0,0";

    auto* vis = app.add_subcommand("vision", "Image pipeline");
    auto* vis_run = vis->add_subcommand("run", "Run one pipeline stage on a PPM image");
    vis->require_subcommand(1);
    add_config_flags(vis_run, f);
    vis_run->add_option("--in", in, "Input PPM (P6) image")->required()->check(CLI::ExistingFile);
    vis_run->add_option("--stage", stage, "gray, hsv, mask, blur, canny, closed, contours, weeds, rows or spot")
        ->required()
        ->check(CLI::IsMember({"gray", "hsv", "mask", "blur", "canny", "closed", "contours", "weeds", "rows", "spot"}));
    vis_run->add_option("--out", vision_out, "Output file; standard output when omitted");

    auto* mission = app.add_subcommand("mission", "Row-following weeding mission");
    auto* mission_run = mission->add_subcommand("run", "Run one mission and print its summary");
    mission->require_subcommand(1);
    add_config_flags(mission_run, f);
    mission_run->add_option("--speed", f.speed, "Forward speed in cm/s")->check(CLI::PositiveNumber);
    mission_run->add_option("--log", log_path, "Write the event log CSV here");
    mission_run->add_option("--out", f.out, "Output directory for frame dumps");
    mission_run->add_flag("--dump-frames", f.dump_frames, "Write every camera frame under <out>/frames/");

    auto* sweep = app.add_subcommand("sweep", "Detection and weeding time against speed");
    add_config_flags(sweep, f);
    sweep->add_option("--speeds", f.speeds, "Comma-separated speeds in cm/s");
    sweep->add_option("--trials", f.trials, "Trials per speed")->check(CLI::PositiveNumber);
    sweep->add_option("--parallel", f.parallel, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--out", f.out, "Output directory");

    auto* accuracy = app.add_subcommand("accuracy", "Laser positional accuracy and hit rate");
    add_config_flags(accuracy, f);
    accuracy->add_option("--speed", f.speed, "Forward speed in cm/s")->check(CLI::PositiveNumber);
    accuracy->add_option("--out", f.out, "Output directory");

    auto* stability = app.add_subcommand("stability", "Obstacle traversal study");
    add_config_flags(stability, f);
    stability->add_option("--parallel", f.parallel, "Worker threads")->check(CLI::PositiveNumber);
    stability->add_option("--out", f.out, "Output directory");

    auto* render = app.add_subcommand("render", "Render one camera frame of a scenario");
    add_config_flags(render, f);
    render->add_option("--x", rx, "Robot x in m");
    render->add_option("--y", ry, "Robot y in m");
    render->add_option("--heading", rheading, "Robot heading in degrees");
    render->add_option("--camera", camera, "down or front")->check(CLI::IsMember({"down", "front"}));
    render->add_option("--speed", f.speed, "Speed in cm/s for motion blur")->check(CLI::NonNegativeNumber);
    render->add_option("--out", f.out, "Output PPM path")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return success;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return success;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return usage_error;
    }

    try {
        const config::RunConfig cfg = resolve(f);
        if (kin->parsed()) {
            return cmd_kinematics(cfg, out);
        }
        if (gantry->parsed()) {
            return cmd_gantry(cfg, from, to, out);
        }
        if (vis->parsed()) {
            return cmd_vision(cfg, in, stage, vision_out, out);
        }
        if (mission->parsed()) {
            return cmd_mission(cfg, log_path, f.dump_frames, out);
        }
        if (render->parsed()) {
            return cmd_render(cfg, rx, ry, rheading, camera, out);
        }
        const StudyConfig study = config::study_config(cfg);
        const fs::path dir(cfg.out);
        if (sweep->parsed()) {
            const auto result = run_speed_sweep(study, cfg.experiment.speeds, cfg.experiment.trials);
            report::export_report(result, dir);
            print_sweep(result, out);
            return success;
        }
        if (accuracy->parsed()) {
            const auto result = run_accuracy_study(study, cfg.experiment.accuracy_speed_cm_s,
                                                   cfg.experiment.histogram_bin_mm);
            report::export_report(result, dir);
            print_accuracy(result, out);
            return success;
        }
        if (stability->parsed()) {
            const auto result = run_stability_study(study, reference_obstacles(), cfg.experiment.stability);
            report::export_report(result, dir);
            print_stability(result, out);
            return success;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return runtime_failure;
    }
    return usage_error;
}

}  // namespace weedbot::cli
