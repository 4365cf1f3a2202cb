#include "weedbot/world.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "weedbot/csv.hpp"
#include "weedbot/error.hpp"
#include "weedbot/rng.hpp"

namespace weedbot {

std::vector<Vec2> CropRow::plant_centers() const
{
    std::vector<Vec2> centers;
    if (plant_spacing_m <= 0.0) {
        return centers;
    }
    for (double s = plant_spacing_m / 2.0; s <= length_m + 1e-12; s += plant_spacing_m) {
        centers.push_back(start + direction * s);
    }
    return centers;
}

std::string to_string(ObstacleKind kind)
{
    switch (kind) {
    case ObstacleKind::rock:
        return "rock";
    case ObstacleKind::organic:
        return "organic";
    case ObstacleKind::incline:
        return "incline";
    }
    return "rock";
}

ObstacleKind obstacle_kind_from_string(const std::string& name)
{
    if (name == "rock") {
        return ObstacleKind::rock;
    }
    if (name == "organic") {
        return ObstacleKind::organic;
    }
    if (name == "incline") {
        return ObstacleKind::incline;
    }
    throw InvalidArgument("unknown obstacle kind: " + name);
}

std::vector<Vec2> FieldScenario::crop_centers() const
{
    std::vector<Vec2> all;
    for (const auto& row : rows) {
        auto c = row.plant_centers();
        all.insert(all.end(), c.begin(), c.end());
    }
    return all;
}

double FieldScenario::inter_row_spacing_m() const
{
    if (rows.size() < 2) {
        return 0.0;
    }
    return (rows[1].start - rows[0].start).norm();
}

std::size_t FieldScenario::eliminated_count() const
{
    return static_cast<std::size_t>(
        std::count_if(weeds.begin(), weeds.end(), [](const Weed& w) { return w.eliminated; }));
}

namespace {

void validate(const ScenarioSpec& spec)
{
    if (!(spec.length_m > 0.0) || !(spec.row_spacing_m > 0.0)) {
        throw InvalidArgument("field dimensions must be positive");
    }
    if (spec.row_count < 1) {
        throw InvalidArgument("scenario needs at least one crop row");
    }
    if (spec.weed_density_per_m < 0.0) {
        throw InvalidArgument("weed density must be non-negative");
    }
    if (!(spec.plant_spacing_m > 2.0 * spec.plant_radius_m) || !(spec.plant_radius_m > 0.0)) {
        throw InvalidArgument("plant spacing must exceed the plant diameter");
    }
    if (!(spec.weed_radius_min_m > 0.002) || !(spec.weed_radius_max_m < 0.05) ||
        spec.weed_radius_min_m > spec.weed_radius_max_m) {
        throw InvalidArgument("weed radius range must lie in (0.002, 0.05) m");
    }
    if (!(spec.weed_height_min_m > 0.01) || !(spec.weed_height_max_m < 0.30) ||
        spec.weed_height_min_m > spec.weed_height_max_m) {
        throw InvalidArgument("weed height range must lie in (0.01, 0.30) m");
    }
    if (spec.weed_band_half_width_m < 0.0 || spec.weed_band_half_width_m >= spec.row_spacing_m / 2.0) {
        throw InvalidArgument("weed band must stay inside the row's share of the field");
    }
}

}  // namespace

FieldScenario generate_scenario(const ScenarioSpec& spec, std::uint64_t seed)
{
    validate(spec);

    FieldScenario field;
    field.seed = seed;
    field.length_m = spec.length_m;
    field.width_m = spec.row_spacing_m * spec.row_count;
    for (int i = 0; i < spec.row_count; ++i) {
        CropRow row;
        row.start = {0.0, spec.row_spacing_m * (0.5 + i)};
        row.direction = {1.0, 0.0};
        row.plant_spacing_m = spec.plant_spacing_m;
        row.plant_radius_m = spec.plant_radius_m;
        row.length_m = spec.length_m;
        field.rows.push_back(row);
    }

    const auto crops = field.crop_centers();
    const auto weed_count = static_cast<std::size_t>(std::llround(spec.weed_density_per_m * spec.length_m));

    Rng rng(mix_seed(seed, 0x5eed));
    constexpr int kMaxAttempts = 10000;
    field.weeds.reserve(weed_count);
    while (field.weeds.size() < weed_count) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            const auto row_idx = static_cast<std::size_t>(rng() % field.rows.size());
            const auto& row = field.rows[row_idx];
            Weed w;
            w.stem_radius_m = uniform(rng, spec.weed_radius_min_m, spec.weed_radius_max_m);
            w.height_m = uniform(rng, spec.weed_height_min_m, spec.weed_height_max_m);
            const double along = uniform(rng, w.stem_radius_m, spec.length_m - w.stem_radius_m);
            const double lateral = uniform(rng, -spec.weed_band_half_width_m, spec.weed_band_half_width_m);
            w.position = row.start + row.direction * along + Vec2{-row.direction.y, row.direction.x} * lateral;

            const bool clear_of_crops = std::none_of(crops.begin(), crops.end(), [&](const Vec2& c) {
                return (c - w.position).norm() < spec.plant_radius_m + w.stem_radius_m + spec.crop_clearance_m;
            });
            const bool clear_of_weeds =
                std::none_of(field.weeds.begin(), field.weeds.end(), [&](const Weed& o) {
                    return (o.position - w.position).norm() < spec.weed_min_separation_m;
                });
            if (clear_of_crops && clear_of_weeds) {
                field.weeds.push_back(w);
                placed = true;
            }
        }
        if (!placed) {
            throw InvalidArgument("weed density too high for the separation constraints");
        }
    }

    field.obstacles = spec.obstacles;
    for (const auto& ob : field.obstacles) {
        if (!(ob.height_cm > 0.0)) {
            throw InvalidArgument("obstacle height must be positive");
        }
    }
    return field;
}

void write_scenario_csv(const FieldScenario& scenario, std::ostream& os)
{
    csv::write_row(os, {"entity", "x", "y", "attributes"});
    for (const auto& row : scenario.rows) {
        for (const auto& c : row.plant_centers()) {
            csv::write_row(os, {"crop", csv::num(c.x), csv::num(c.y), "radius=" + csv::num(row.plant_radius_m)});
        }
    }
    for (const auto& w : scenario.weeds) {
        csv::write_row(os, {"weed", csv::num(w.position.x), csv::num(w.position.y),
                            "radius=" + csv::num(w.stem_radius_m) + ";height=" + csv::num(w.height_m) +
                                ";eliminated=" + (w.eliminated ? "1" : "0")});
    }
    for (const auto& ob : scenario.obstacles) {
        csv::write_row(os, {"obstacle", csv::num(ob.position.x), csv::num(ob.position.y),
                            "kind=" + to_string(ob.kind) + ";height_cm=" + csv::num(ob.height_cm, 2)});
    }
}

std::vector<Vec2> RobotGeometry::wheel_contacts() const
{
    std::vector<Vec2> out;
    for (double f : wheel_offsets_m) {
        out.push_back({f, track_width_m / 2.0});
        out.push_back({f, -track_width_m / 2.0});
    }
    return out;
}

RobotState advance(const RobotState& state, WheelSpeeds speeds, double dt_s, const RobotGeometry& geometry)
{
    if (!(dt_s > 0.0)) {
        throw InvalidArgument("advance requires dt > 0");
    }
    const double vmax = geometry.max_side_speed_cm_s;
    const double left = std::clamp(speeds.left_cm_s, -vmax, vmax) / 100.0;
    const double right = std::clamp(speeds.right_cm_s, -vmax, vmax) / 100.0;
    const double v = 0.5 * (left + right);
    const double omega = (right - left) / geometry.track_width_m;

    RobotState next = state;
    const double th = state.heading_rad;
    if (omega == 0.0) {
        next.position = state.position + Vec2{std::cos(th), std::sin(th)} * (v * dt_s);
    } else if (v != 0.0) {
        const double th1 = th + omega * dt_s;
        const double radius = v / omega;
        next.position = state.position + Vec2{radius * (std::sin(th1) - std::sin(th)),
                                               -radius * (std::cos(th1) - std::cos(th))};
    }
    next.heading_rad = normalize_angle(th + omega * dt_s);
    next.linear_speed_cm_s = v * 100.0;
    next.odometer_m = state.odometer_m + std::abs(v) * dt_s;
    next.clock_s = state.clock_s + dt_s;
    return next;
}

}  // namespace weedbot
