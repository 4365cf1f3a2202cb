#include "weedbot/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "weedbot/error.hpp"

namespace weedbot::config {

double Value::as_double() const
{
    if (type == Type::floating) {
        return d;
    }
    if (type == Type::integer) {
        return static_cast<double>(i);
    }
    throw ConfigError("expected a number");
}

std::int64_t Value::as_int() const
{
    if (type != Type::integer) {
        throw ConfigError("expected an integer");
    }
    return i;
}

bool Value::as_bool() const
{
    if (type != Type::boolean) {
        throw ConfigError("expected true or false");
    }
    return b;
}

const std::string& Value::as_string() const
{
    if (type != Type::string) {
        throw ConfigError("expected a string");
    }
    return s;
}

const std::vector<Value>& Value::as_array() const
{
    if (type != Type::array) {
        throw ConfigError("expected an array");
    }
    return items;
}

namespace {

class Parser {
public:
    Parser(std::string_view text, int line) : text_(text), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError("line " + std::to_string(line_) + ": " + what);
    }

    void skip_space()
    {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                if (c == '\n') {
                    ++line_;
                }
                ++pos_;
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    [[nodiscard]] bool at_end() const { return pos_ >= text_.size(); }

    Value value()
    {
        skip_space();
        if (at_end()) {
            fail("missing value");
        }
        const char c = text_[pos_];
        if (c == '"') {
            return string_value();
        }
        if (c == '[') {
            return array_value();
        }
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            Value v;
            v.type = Value::Type::boolean;
            v.b = true;
            return v;
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            Value v;
            v.type = Value::Type::boolean;
            return v;
        }
        return number_value();
    }

private:
    Value string_value()
    {
        ++pos_;
        Value v;
        v.type = Value::Type::string;
        while (true) {
            if (at_end() || text_[pos_] == '\n') {
                fail("unterminated string");
            }
            const char c = text_[pos_++];
            if (c == '"') {
                break;
            }
            if (c != '\\') {
                v.s += c;
                continue;
            }
            if (at_end()) {
                fail("unterminated escape");
            }
            const char e = text_[pos_++];
            switch (e) {
            case '"': v.s += '"'; break;
            case '\\': v.s += '\\'; break;
            case 'n': v.s += '\n'; break;
            case 't': v.s += '\t'; break;
            default: fail(std::string("unsupported escape \\") + e);
            }
        }
        return v;
    }

    Value array_value()
    {
        ++pos_;
        Value v;
        v.type = Value::Type::array;
        while (true) {
            skip_space();
            if (at_end()) {
                fail("unterminated array");
            }
            if (text_[pos_] == ']') {
                ++pos_;
                return v;
            }
            v.items.push_back(value());
            skip_space();
            if (at_end()) {
                fail("unterminated array");
            }
            if (text_[pos_] == ',') {
                ++pos_;
            } else if (text_[pos_] != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }

    Value number_value()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == 'e' || c == 'E') {
                ++pos_;
            } else {
                break;
            }
        }
        const std::string token(text_.substr(start, pos_ - start));
        if (token.empty()) {
            fail("unrecognized value");
        }
        Value v;
        const bool is_float = token.find_first_of(".eE") != std::string::npos;
        const char* first = token.data();
        if (token[0] == '+') {
            ++first;
        }
        const char* last = token.data() + token.size();
        if (is_float) {
            v.type = Value::Type::floating;
            const auto [p, ec] = std::from_chars(first, last, v.d);
            if (ec != std::errc() || p != last) {
                fail("invalid number '" + token + "'");
            }
        } else {
            v.type = Value::Type::integer;
            const auto [p, ec] = std::from_chars(first, last, v.i);
            if (ec != std::errc() || p != last) {
                fail("invalid integer '" + token + "'");
            }
        }
        return v;
    }

public:
    std::string_view text_;
    std::size_t pos_{0};
    int line_;
};

bool bare_key_char(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

void check_dotted_name(const std::string& name, int line)
{
    bool prev_dot = true;
    for (char c : name) {
        if (c == '.') {
            if (prev_dot) {
                throw ConfigError("line " + std::to_string(line) + ": invalid table name '" + name + "'");
            }
            prev_dot = true;
        } else if (bare_key_char(c)) {
            prev_dot = false;
        } else {
            throw ConfigError("line " + std::to_string(line) + ": invalid table name '" + name + "'");
        }
    }
    if (prev_dot) {
        throw ConfigError("line " + std::to_string(line) + ": invalid table name '" + name + "'");
    }
}

}  // namespace

Document parse_toml(std::string_view text)
{
    Document doc;
    doc.tables[""];
    Table* current = &doc.tables[""];
    std::size_t pos = 0;
    int line = 1;
    while (pos < text.size()) {
        Parser p(text.substr(pos), line);
        p.skip_space();
        pos += p.pos_;
        line = p.line_;
        if (pos >= text.size()) {
            break;
        }
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view rest = text.substr(pos, eol - pos);
        if (rest.substr(0, 2) == "[[") {
            const auto close = rest.find("]]");
            if (close == std::string_view::npos) {
                throw ConfigError("line " + std::to_string(line) + ": unterminated table array header");
            }
            const std::string name = trim(rest.substr(2, close - 2));
            check_dotted_name(name, line);
            if (doc.tables.count(name) != 0) {
                throw ConfigError("line " + std::to_string(line) + ": '" + name + "' is already a table");
            }
            auto& arr = doc.table_arrays[name];
            arr.emplace_back();
            current = &arr.back();
            pos += close + 2;
        } else if (rest.substr(0, 1) == "[") {
            const auto close = rest.find(']');
            if (close == std::string_view::npos) {
                throw ConfigError("line " + std::to_string(line) + ": unterminated table header");
            }
            const std::string name = trim(rest.substr(1, close - 1));
            check_dotted_name(name, line);
            if ((doc.tables.count(name) != 0 && !name.empty()) || doc.table_arrays.count(name) != 0) {
                throw ConfigError("line " + std::to_string(line) + ": duplicate table '" + name + "'");
            }
            current = &doc.tables[name];
            pos += close + 1;
        } else {
            std::size_t k = 0;
            while (k < rest.size() && bare_key_char(rest[k])) {
                ++k;
            }
            if (k == 0) {
                throw ConfigError("line " + std::to_string(line) + ": expected a key");
            }
            const std::string key(rest.substr(0, k));
            std::size_t q = k;
            while (q < rest.size() && (rest[q] == ' ' || rest[q] == '\t')) {
                ++q;
            }
            if (q >= rest.size() || rest[q] != '=') {
                throw ConfigError("line " + std::to_string(line) + ": expected '=' after '" + key + "'");
            }
            Parser vp(text.substr(pos + q + 1), line);
            Value v = vp.value();
            if (current->count(key) != 0) {
                throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
            }
            (*current)[key] = std::move(v);
            pos += q + 1 + vp.pos_;
            line = vp.line_;
        }
        // Only a comment may follow on the same line.
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r')) {
            ++pos;
        }
        if (pos < text.size() && text[pos] != '\n' && text[pos] != '#') {
            throw ConfigError("line " + std::to_string(line) + ": unexpected trailing text");
        }
    }
    return doc;
}

Document load_toml(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_toml(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace {

using Setter = std::function<void(const Value&)>;
using Bindings = std::map<std::string, Setter>;

Setter num(double& target)
{
    return [&target](const Value& v) { target = v.as_double(); };
}

Setter integer(int& target)
{
    return [&target](const Value& v) { target = static_cast<int>(v.as_int()); };
}

Setter flag(bool& target)
{
    return [&target](const Value& v) { target = v.as_bool(); };
}

Setter hsv(vision::Hsv& target)
{
    return [&target](const Value& v) {
        const auto& a = v.as_array();
        if (a.size() != 3) {
            throw ConfigError("expected [h, s, v]");
        }
        std::uint8_t out[3];
        for (int i = 0; i < 3; ++i) {
            const auto x = a[static_cast<std::size_t>(i)].as_int();
            if (x < 0 || x > 255) {
                throw ConfigError("HSV component out of range");
            }
            out[i] = static_cast<std::uint8_t>(x);
        }
        target = {out[0], out[1], out[2]};
    };
}

Setter kernel(vision::StructuringElement& target)
{
    return [&target](const Value& v) {
        const auto& a = v.as_array();
        if (a.size() != 2) {
            throw ConfigError("expected [width, height]");
        }
        target = {static_cast<int>(a[0].as_int()), static_cast<int>(a[1].as_int())};
    };
}

void bind_table(const Table& table, const std::string& name, const Bindings& bindings)
{
    for (const auto& [key, value] : table) {
        const auto it = bindings.find(key);
        if (it == bindings.end()) {
            throw ConfigError("unknown key '" + key + "' in [" + name + "]");
        }
        try {
            it->second(value);
        } catch (const ConfigError& e) {
            throw ConfigError("[" + name + "] " + key + ": " + e.what());
        }
    }
}

Bindings axis_bindings(actuation::AxisConfig& a)
{
    return {
        {"drive",
         [&a](const Value& v) {
             const auto& s = v.as_string();
             if (s == "belt") {
                 a.drive = actuation::Drive::belt;
             } else if (s == "lead_screw") {
                 a.drive = actuation::Drive::lead_screw;
             } else {
                 throw ConfigError("drive must be belt or lead_screw");
             }
         }},
        {"pitch_mm", num(a.pitch_mm)},
        {"teeth", integer(a.teeth)},
        {"steps_per_rev", integer(a.steps_per_rev)},
        {"microstepping", integer(a.microstepping)},
        {"travel_mm", num(a.travel_mm)},
        {"dual_motor", flag(a.dual_motor)},
        {"step_rate_hz", num(a.step_rate_hz)},
        {"repeatability_sigma_mm", num(a.repeatability_sigma_mm)},
    };
}

Bindings camera_bindings(vision::CameraModel& c)
{
    return {
        {"mount_x_m", num(c.mount.position.x)},
        {"mount_y_m", num(c.mount.position.y)},
        {"footprint_u_m", num(c.footprint_u_m)},
        {"footprint_v_m", num(c.footprint_v_m)},
        {"width", integer(c.width)},
        {"height", integer(c.height)},
        {"pixel_noise_sigma", num(c.pixel_noise_sigma)},
        {"motion_blur_px_per_cmps", num(c.motion_blur_px_per_cmps)},
    };
}

Obstacle parse_obstacle(const Table& t)
{
    Obstacle o;
    bind_table(t, "world.obstacles",
         {{"x_m", num(o.position.x)},
          {"y_m", num(o.position.y)},
          {"height_cm", num(o.height_cm)},
          {"kind", [&o](const Value& v) { o.kind = obstacle_kind_from_string(v.as_string()); }}});
    return o;
}

}  // namespace

void apply(const Document& doc, RunConfig& config)
{
    auto& w = config.world;
    auto& m = config.mission;
    auto& n = m.nav;
    auto& g = m.gantry;
    auto& vis = m.vision;
    auto& rd = m.row_detection;
    auto& e = config.experiment;
    std::uint64_t seed = config.seed;

    std::map<std::string, Bindings> sections;
    sections[""] = {
        {"seed",
         [&seed](const Value& v) {
             const auto s = v.as_int();
             if (s < 0) {
                 throw ConfigError("seed must be non-negative");
             }
             seed = static_cast<std::uint64_t>(s);
         }},
        {"out", [&config](const Value& v) { config.out = v.as_string(); }},
    };
    sections["world"] = {
        {"length_m", num(w.length_m)},
        {"row_count", integer(w.row_count)},
        {"row_spacing_m", num(w.row_spacing_m)},
        {"plant_spacing_m", num(w.plant_spacing_m)},
        {"plant_radius_m", num(w.plant_radius_m)},
        {"weed_density_per_m", num(w.weed_density_per_m)},
        {"weed_band_half_width_m", num(w.weed_band_half_width_m)},
        {"weed_radius_min_m", num(w.weed_radius_min_m)},
        {"weed_radius_max_m", num(w.weed_radius_max_m)},
        {"weed_height_min_m", num(w.weed_height_min_m)},
        {"weed_height_max_m", num(w.weed_height_max_m)},
        {"weed_min_separation_m", num(w.weed_min_separation_m)},
        {"crop_clearance_m", num(w.crop_clearance_m)},
    };
    sections["robot"] = {
        {"track_width_m", num(m.robot.track_width_m)},
        {"wheel_half_width_m", num(m.robot.wheel_half_width_m)},
        {"max_side_speed_cm_s", num(m.robot.max_side_speed_cm_s)},
    };
    sections["suspension"] = {
        {"a", num(m.suspension.a)},
        {"b", num(m.suspension.b)},
        {"c", num(m.suspension.c)},
        {"theta2", num(m.suspension.theta2)},
        {"h", num(m.suspension.h)},
        {"r", num(m.suspension.r)},
    };
    sections["traversal"] = {
        {"rock_factor", num(m.traversal.rock_factor)},
        {"organic_factor", num(m.traversal.organic_factor)},
        {"incline_factor", num(m.traversal.incline_factor)},
        {"smooth_climb_limit_cm", num(m.traversal.smooth_climb_limit_cm)},
        {"light_deviation_onset_cm", num(m.traversal.light_deviation_onset_cm)},
    };
    sections["obstacle_effects"] = {
        {"footprint_radius_m", num(m.obstacle_effects.footprint_radius_m)},
        {"light_kick_deg", num(m.obstacle_effects.light_kick_deg)},
        {"significant_kick_deg", num(m.obstacle_effects.significant_kick_deg)},
        {"partial_blur_px", num(m.obstacle_effects.partial_blur_px)},
        {"unstable_blur_px", num(m.obstacle_effects.unstable_blur_px)},
    };
    sections["gantry"] = {
        {"mount_height_mm", num(g.mount_height_mm)},
        {"quantize", flag(g.quantize)},
    };
    sections["gantry.x"] = axis_bindings(g.x);
    sections["gantry.y"] = axis_bindings(g.y);
    sections["gantry.z"] = axis_bindings(g.z);
    sections["gantry.laser"] = {
        {"power_w", num(g.laser.power_w)},
        {"wavelength_nm", num(g.laser.wavelength_nm)},
        {"exposure_s", num(g.laser.exposure_s)},
        {"standoff_mm", num(g.laser.standoff_mm)},
        {"kill_margin_mm", num(g.laser.kill_margin_mm)},
    };
    sections["gantry.ultrasonic"] = {
        {"cone_half_angle_deg", num(g.ultrasonic.cone_half_angle_deg)},
        {"noise_sigma_mm", num(g.ultrasonic.noise_sigma_mm)},
    };
    sections["vision"] = {
        {"green_lo", hsv(vis.green_lo)},
        {"green_hi", hsv(vis.green_hi)},
        {"blur_sigma", num(vis.blur_sigma)},
        {"blur_kernel", integer(vis.blur_kernel)},
        {"canny_low", num(vis.canny_low)},
        {"canny_high", num(vis.canny_high)},
        {"close_kernel", kernel(vis.close_kernel)},
        {"noise_frac", num(vis.classifier.noise_frac)},
        {"crop_frac", num(vis.classifier.crop_frac)},
        {"crop_min_area_px2", num(vis.crop_min_area_px2)},
        {"crop_min_extent_px", integer(vis.crop_min_extent_px)},
        {"min_weed_area_px2", num(vis.min_weed_area_px2)},
        {"merge_gap_px", integer(vis.merge_gap_px)},
        {"crop_guard_px", integer(vis.crop_guard_px)},
        {"reject_border_contours", flag(vis.reject_border_contours)},
    };
    sections["rows"] = {
        {"green_lo", hsv(rd.green_lo)},
        {"green_hi", hsv(rd.green_hi)},
        {"band_blur_sigma", num(rd.band_blur_sigma)},
        {"band_blur_kernel", integer(rd.band_blur_kernel)},
        {"band_level", integer(rd.band_level)},
        {"min_component_area_px2", num(rd.min_component_area_px2)},
        {"canny_low", num(rd.canny_low)},
        {"canny_high", num(rd.canny_high)},
        {"hough_rho_res_px", num(rd.hough.rho_res_px)},
        {"hough_theta_res_deg", num(rd.hough.theta_res_deg)},
        {"hough_votes_min", integer(rd.hough.votes_min)},
        {"hough_peak_radius_rho", integer(rd.hough.peak_radius_rho)},
        {"hough_peak_radius_theta", integer(rd.hough.peak_radius_theta)},
        {"hough_parallel_tol_deg", num(rd.hough.parallel_tol_deg)},
        {"max_row_angle_deg", num(rd.max_row_angle_deg)},
        {"min_plant_area_px2", num(rd.min_plant_area_px2)},
        {"refine_band_px", num(rd.refine_band_px)},
        {"pair_angle_tol_deg", num(rd.pair_angle_tol_deg)},
        {"min_band_width_px", num(rd.min_band_width_px)},
        {"max_band_width_px", num(rd.max_band_width_px)},
    };
    sections["camera.down"] = camera_bindings(m.down_camera);
    sections["camera.front"] = camera_bindings(m.front_camera);
    sections["navigation"] = {
        {"deviation_threshold_deg", num(n.deviation_threshold_deg)},
        {"exit_distance_m", num(n.exit_distance_m)},
        {"max_rows", integer(n.max_rows)},
        {"speed_cm_s", num(n.speed_cm_s)},
        {"frame_period_s", num(n.frame_period_s)},
        {"turn_rate_deg_s", num(n.turn_rate_deg_s)},
        {"stuck_timeout_s", num(n.stuck_timeout_s)},
        {"dedup_radius_m", num(n.dedup_radius_m)},
        {"search_distance_m", num(n.search_distance_m)},
        {"align_tolerance_m", num(n.align_tolerance_m)},
        {"first_turn_left", flag(n.first_turn_left)},
        {"inter_row_spacing_m", num(n.inter_row_spacing_m)},
        {"fire", flag(n.fire)},
        {"stop_overhead_s", num(n.stop_overhead_s)},
        {"park_after_stop", flag(n.park_after_stop)},
        {"match_margin_m", num(m.match_margin_m)},
        {"max_time_s", num(m.max_time_s)},
    };
    sections["experiment"] = {
        {"speeds",
         [&e](const Value& v) {
             e.speeds.clear();
             for (const auto& item : v.as_array()) {
                 e.speeds.push_back(item.as_double());
             }
         }},
        {"trials", integer(e.trials)},
        {"accuracy_speed_cm_s", num(e.accuracy_speed_cm_s)},
        {"histogram_bin_mm", num(e.histogram_bin_mm)},
        {"parallel", integer(e.parallel)},
        {"stability_row_length_m", num(e.stability.row_length_m)},
        {"stability_obstacle_along_m", num(e.stability.obstacle_along_m)},
        {"stability_speed_cm_s", num(e.stability.speed_cm_s)},
    };

    for (const auto& [name, table] : doc.tables) {
        const auto it = sections.find(name);
        if (it == sections.end()) {
            throw ConfigError("unknown table [" + name + "]");
        }
        bind_table(table, name.empty() ? "root" : name, it->second);
    }
    for (const auto& [name, tables] : doc.table_arrays) {
        if (name != "world.obstacles") {
            throw ConfigError("unknown table array [[" + name + "]]");
        }
        w.obstacles.clear();
        for (const auto& t : tables) {
            w.obstacles.push_back(parse_obstacle(t));
        }
    }
    config.seed = seed;
    m.calibration = vision::GantryCalibration::from_camera(m.down_camera);
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    RunConfig config;
    apply(load_toml(path), config);
    return config;
}

StudyConfig study_config(const RunConfig& config)
{
    StudyConfig s;
    s.scenario = config.world;
    s.mission = config.mission;
    s.mission.seed = config.seed;
    s.seed = config.seed;
    s.parallel = config.experiment.parallel;
    return s;
}

std::vector<double> parse_number_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        double v = 0.0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc() || p != t.data() + t.size()) {
            throw InvalidArgument("invalid number '" + t + "' in list '" + text + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw InvalidArgument("empty number list");
    }
    return out;
}

}  // namespace weedbot::config
