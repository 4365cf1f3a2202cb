#include "weedbot/vision/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "weedbot/error.hpp"

namespace weedbot::vision {

namespace {

RasterImage green_mask(const RasterImage& rgb, Hsv lo, Hsv hi)
{
    if (rgb.channels() != 3) {
        throw InvalidArgument("expected an RGB image");
    }
    return hsv_threshold(rgb_to_hsv(rgb), lo, hi);
}

// Keeps 8-connected foreground components with at least min_area pixels.
RasterImage drop_small_components(const RasterImage& binary, double min_area)
{
    const int w = binary.width();
    const int h = binary.height();
    RasterImage out(w, h, 1, 0);
    std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
    std::vector<int> stack;
    std::vector<int> members;
    for (int start = 0; start < w * h; ++start) {
        if (seen[start] || binary.at(start % w, start / w) == 0) {
            continue;
        }
        members.clear();
        stack.assign(1, start);
        seen[start] = 1;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            members.push_back(i);
            const int x = i % w;
            const int y = i / w;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (!binary.contains(nx, ny)) {
                        continue;
                    }
                    const int j = ny * w + nx;
                    if (!seen[j] && binary.at(nx, ny) != 0) {
                        seen[j] = 1;
                        stack.push_back(j);
                    }
                }
            }
        }
        if (static_cast<double>(members.size()) >= min_area) {
            for (int i : members) {
                out.at(i % w, i / w) = 255;
            }
        }
    }
    return out;
}

// +1 if the mask is foreground on the +normal side of the line, -1 if on the
// -normal side, 0 if undecided.
int edge_polarity(const RasterImage& mask, const DetectedRow& line)
{
    const double th = deg_to_rad(line.theta_deg);
    const Vec2 n{std::cos(th), std::sin(th)};
    const Vec2 d{-n.y, n.x};
    const double cx = (mask.width() - 1) / 2.0;
    const double cy = (mask.height() - 1) / 2.0;
    const Vec2 foot{cx + line.distance_from_center_px * n.x, cy + line.distance_from_center_px * n.y};
    const double reach = std::hypot(mask.width(), mask.height()) / 2.0;
    int plus = 0;
    int minus = 0;
    for (double t = -reach; t <= reach; t += 2.0) {
        const Vec2 p = foot + d * t;
        for (double off : {2.5, 3.5}) {
            const Vec2 a = p + n * off;
            const Vec2 b = p - n * off;
            const int ax = static_cast<int>(std::lround(a.x));
            const int ay = static_cast<int>(std::lround(a.y));
            const int bx = static_cast<int>(std::lround(b.x));
            const int by = static_cast<int>(std::lround(b.y));
            if (!mask.contains(ax, ay) || !mask.contains(bx, by)) {
                continue;
            }
            const bool fa = mask.at(ax, ay) != 0;
            const bool fb = mask.at(bx, by) != 0;
            if (fa && !fb) {
                ++plus;
            } else if (fb && !fa) {
                ++minus;
            }
        }
    }
    if (plus > 2 * minus && plus > 0) {
        return 1;
    }
    if (minus > 2 * plus && minus > 0) {
        return -1;
    }
    return 0;
}

// Least-squares refinement of a near-vertical Hough line, x = a + b (y - cy),
// over edge pixels within `band` px of it. Canny keeps the pixel on the low-x
// side of a horizontal step, so the boundary lies half a pixel to the right.
struct RefinedEdge {
    double angle_deg;
    double x0;   // offset from the image center column along the center row
};

RefinedEdge refine_edge(const RasterImage& edges, const DetectedRow& line, double band)
{
    const double th = deg_to_rad(line.theta_deg);
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double cx = (edges.width() - 1) / 2.0;
    const double cy = (edges.height() - 1) / 2.0;
    double n = 0.0;
    double sy = 0.0;
    double sx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (int y = 0; y < edges.height(); ++y) {
        for (int x = 0; x < edges.width(); ++x) {
            if (edges.at(x, y) == 0) {
                continue;
            }
            const double xc = x - cx;
            const double yc = y - cy;
            if (std::abs(xc * c + yc * s - line.distance_from_center_px) > band) {
                continue;
            }
            const double bx = xc + 0.5;
            n += 1.0;
            sy += yc;
            sx += bx;
            syy += yc * yc;
            sxy += yc * bx;
        }
    }
    const double den = n * syy - sy * sy;
    if (n < 10.0 || std::abs(den) < 1e-9) {
        return {line.angle_deg, line.lateral_offset_px()};
    }
    const double slope = (n * sxy - sy * sx) / den;
    const double intercept = (sx - slope * sy) / n;
    return {rad_to_deg(std::atan(slope)), intercept};
}

// Refits a band centerline from the per-row centroid of mask pixels lying
// between its two edges. Plants are symmetric about the row line, so the
// centroids scatter evenly around it.
RefinedEdge fit_centerline(const RasterImage& mask, const RefinedEdge& left, const RefinedEdge& right)
{
    const double cx = (mask.width() - 1) / 2.0;
    const double cy = (mask.height() - 1) / 2.0;
    const double tl = std::tan(deg_to_rad(left.angle_deg));
    const double tr = std::tan(deg_to_rad(right.angle_deg));
    double n = 0.0;
    double sy = 0.0;
    double sx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (int y = 0; y < mask.height(); ++y) {
        const double yc = y - cy;
        const int x0 = std::max(0, static_cast<int>(std::floor(cx + left.x0 + tl * yc - 2.0)));
        const int x1 = std::min(mask.width() - 1, static_cast<int>(std::ceil(cx + right.x0 + tr * yc + 2.0)));
        double cnt = 0.0;
        double sum = 0.0;
        for (int x = x0; x <= x1; ++x) {
            if (mask.at(x, y) != 0) {
                cnt += 1.0;
                sum += x - cx;
            }
        }
        if (cnt == 0.0) {
            continue;
        }
        const double mx = sum / cnt;
        n += cnt;
        sy += cnt * yc;
        sx += cnt * mx;
        syy += cnt * yc * yc;
        sxy += cnt * yc * mx;
    }
    const double den = n * syy - sy * sy;
    if (n < 10.0 || std::abs(den) < 1e-9) {
        return {0.5 * (left.angle_deg + right.angle_deg), 0.5 * (left.x0 + right.x0)};
    }
    const double slope = (n * sxy - sy * sx) / den;
    return {rad_to_deg(std::atan(slope)), (sx - slope * sy) / n};
}

}  // namespace

WeedDetection detect_weeds(const RasterImage& rgb, const Rect& work_area, const VisionConfig& config)
{
    if (work_area.width <= 0 || work_area.height <= 0 || work_area.x < 0 || work_area.y < 0 ||
        work_area.x + work_area.width > rgb.width() || work_area.y + work_area.height > rgb.height()) {
        throw InvalidArgument("work area outside the image");
    }
    const RasterImage roi = crop(rgb, work_area);
    const RasterImage mask = green_mask(roi, config.green_lo, config.green_hi);
    const RasterImage smooth = gaussian_blur(mask, config.blur_sigma, config.blur_kernel);
    const RasterImage edges = canny(smooth, config.canny_low, config.canny_high);
    const RasterImage closed = close(edges, config.close_kernel);

    WeedDetection out;
    out.contours = find_contours(closed);
    if (config.reject_border_contours) {
        // Cut shapes would also distort the per-frame maxima the classifier uses.
        std::erase_if(out.contours, [](const Contour& c) { return c.touches_border; });
    }
    classify_contours(out.contours, config.classifier);
    std::vector<Rect> crops;
    for (auto& c : out.contours) {
        if (c.cls != ContourClass::noise) {
            const bool big = c.area_px2 >= config.crop_min_area_px2 ||
                             std::min(c.bounds.width, c.bounds.height) >= config.crop_min_extent_px;
            c.cls = big ? ContourClass::crop : ContourClass::weed;
        }
        if (c.cls == ContourClass::crop) {
            const int m = config.crop_guard_px;
            crops.push_back({c.bounds.x - m, c.bounds.y - m, c.bounds.width + 2 * m, c.bounds.height + 2 * m});
        }
    }
    std::vector<const Contour*> weeds;
    for (auto& c : out.contours) {
        if (c.cls != ContourClass::weed || c.area_px2 < config.min_weed_area_px2) {
            continue;
        }
        const int cx = static_cast<int>(std::lround(c.centroid.x));
        const int cy = static_cast<int>(std::lround(c.centroid.y));
        if (std::any_of(crops.begin(), crops.end(), [&](const Rect& r) { return r.contains(cx, cy); })) {
            continue;
        }
        weeds.push_back(&c);
    }

    // Fragments of one plant (motion blur can split it) whose boxes come within
    // merge_gap_px of each other become one target at their area-weighted centroid.
    const int gap = config.merge_gap_px;
    std::vector<int> group(weeds.size());
    for (std::size_t i = 0; i < weeds.size(); ++i) {
        group[i] = static_cast<int>(i);
    }
    auto find = [&](int i) {
        while (group[i] != i) {
            i = group[i] = group[group[i]];
        }
        return i;
    };
    for (std::size_t i = 0; i < weeds.size(); ++i) {
        for (std::size_t j = i + 1; j < weeds.size(); ++j) {
            const Rect& a = weeds[i]->bounds;
            const Rect& b = weeds[j]->bounds;
            const bool near = a.x - gap < b.x + b.width && b.x - gap < a.x + a.width && a.y - gap < b.y + b.height &&
                              b.y - gap < a.y + a.height;
            if (near) {
                group[find(static_cast<int>(j))] = find(static_cast<int>(i));
            }
        }
    }
    for (std::size_t i = 0; i < weeds.size(); ++i) {
        if (find(static_cast<int>(i)) != static_cast<int>(i)) {
            continue;
        }
        double area = 0.0;
        Vec2 sum;
        for (std::size_t j = 0; j < weeds.size(); ++j) {
            if (find(static_cast<int>(j)) == static_cast<int>(i)) {
                area += weeds[j]->area_px2;
                sum = sum + weeds[j]->centroid * weeds[j]->area_px2;
            }
        }
        out.centroids_px.push_back({sum.x / area + work_area.x, sum.y / area + work_area.y});
    }
    return out;
}

WeedDetection detect_weeds(const RasterImage& rgb, const VisionConfig& config)
{
    return detect_weeds(rgb, Rect{0, 0, rgb.width(), rgb.height()}, config);
}

std::vector<DetectedRow> detect_rows(const RasterImage& rgb, const RowDetectionConfig& config)
{
    const RasterImage mask = green_mask(rgb, config.green_lo, config.green_hi);
    RasterImage bands = gaussian_blur(mask, config.band_blur_sigma, config.band_blur_kernel);
    for (auto& v : bands.data()) {
        v = v >= config.band_level ? 255 : 0;
    }
    bands = drop_small_components(bands, config.min_component_area_px2);
    const RasterImage edges = canny(bands, config.canny_low, config.canny_high);
    const RasterImage plants = drop_small_components(mask, config.min_plant_area_px2);

    struct Edge {
        DetectedRow line;
        double angle_deg;
        double x0;        // lateral offset along the center image row
        bool band_right;  // band lies toward +x of this edge
    };
    std::vector<Edge> found;
    for (const auto& line : hough_lines(edges, config.hough)) {
        if (std::abs(line.angle_deg) >= config.max_row_angle_deg) {
            continue;
        }
        const int pol = edge_polarity(bands, line);
        if (pol == 0) {
            continue;
        }
        const double nx = std::cos(deg_to_rad(line.theta_deg));
        const RefinedEdge fit = refine_edge(edges, line, config.refine_band_px);
        found.push_back({line, fit.angle_deg, fit.x0, (pol > 0) == (nx > 0)});
    }
    std::sort(found.begin(), found.end(), [](const Edge& a, const Edge& b) { return a.x0 < b.x0; });

    std::vector<DetectedRow> rows;
    std::vector<char> used(found.size(), 0);
    for (std::size_t i = 0; i < found.size(); ++i) {
        if (used[i] || !found[i].band_right) {
            continue;
        }
        for (std::size_t j = i + 1; j < found.size(); ++j) {
            if (used[j] || found[j].band_right) {
                continue;
            }
            const double width = found[j].x0 - found[i].x0;
            if (width > config.max_band_width_px) {
                break;
            }
            if (width < config.min_band_width_px ||
                std::abs(found[i].angle_deg - found[j].angle_deg) > config.pair_angle_tol_deg) {
                continue;
            }
            const RefinedEdge center = fit_centerline(plants, {found[i].angle_deg, found[i].x0},
                                                      {found[j].angle_deg, found[j].x0});
            const double angle = center.angle_deg;
            const double x0 = center.x0;
            const double theta = angle <= 0.0 ? -angle : 180.0 - angle;
            const double rho = x0 * std::cos(deg_to_rad(theta));
            rows.push_back(make_line(theta, rho, rgb.width(), rgb.height(), found[i].line.votes + found[j].line.votes));
            used[i] = used[j] = 1;
            break;
        }
    }

    std::sort(rows.begin(), rows.end(), [](const DetectedRow& a, const DetectedRow& b) {
        return a.lateral_offset_px() < b.lateral_offset_px();
    });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double best = 0.0;
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (i == j) {
                continue;
            }
            const double c = std::cos(deg_to_rad(0.5 * (rows[i].angle_deg + rows[j].angle_deg)));
            const double gap = std::abs(rows[i].lateral_offset_px() - rows[j].lateral_offset_px()) * c;
            if (gap > 0.0 && (best == 0.0 || gap < best)) {
                best = gap;
            }
        }
        rows[i].inter_row_spacing_px = best;
    }
    return rows;
}

std::optional<Vec2> detect_laser_spot(const RasterImage& rgb, const LaserSpotConfig& config)
{
    if (rgb.channels() != 3) {
        throw InvalidArgument("expected an RGB image");
    }
    RasterImage mask(rgb.width(), rgb.height(), 1, 0);
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            if (std::abs(rgb.at(x, y, 0) - config.color.r) <= config.tolerance &&
                std::abs(rgb.at(x, y, 1) - config.color.g) <= config.tolerance &&
                std::abs(rgb.at(x, y, 2) - config.color.b) <= config.tolerance) {
                mask.at(x, y) = 255;
            }
        }
    }
    const auto contours = find_contours(mask);
    const Contour* best = nullptr;
    for (const auto& c : contours) {
        if (c.area_px2 >= config.min_area_px2 && (best == nullptr || c.area_px2 > best->area_px2)) {
            best = &c;
        }
    }
    if (best == nullptr) {
        return std::nullopt;
    }
    return best->centroid;
}

Vec2 mirror_transform(const Vec2& px, int height)
{
    return {px.x, (height - 1) - px.y};
}

GantryCalibration GantryCalibration::from_camera(const CameraModel& camera)
{
    return {camera.meters_per_px_u() * 1000.0, camera.meters_per_px_v() * 1000.0, {0.0, 0.0}};
}

Vec2 pixel_to_gantry(const Vec2& px, const GantryCalibration& cal)
{
    return {cal.offset_mm.x + px.x * cal.mm_per_px_u, cal.offset_mm.y + px.y * cal.mm_per_px_v};
}

Vec2 gantry_to_pixel(const Vec2& mm, const GantryCalibration& cal)
{
    return {(mm.x - cal.offset_mm.x) / cal.mm_per_px_u, (mm.y - cal.offset_mm.y) / cal.mm_per_px_v};
}

}  // namespace weedbot::vision
