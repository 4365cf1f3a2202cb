#include "weedbot/vision/hough.hpp"

#include <algorithm>
#include <cmath>

#include "weedbot/error.hpp"

namespace weedbot::vision {

double DetectedRow::lateral_offset_px() const
{
    const double c = std::cos(deg_to_rad(theta_deg));
    if (std::abs(c) < 1e-9) {
        return distance_from_center_px;
    }
    return distance_from_center_px / c;
}

DetectedRow make_line(double theta_deg, double rho_px, int width, int height, int votes)
{
    DetectedRow row;
    row.votes = votes;
    row.theta_deg = theta_deg;
    row.distance_from_center_px = rho_px;
    if (theta_deg < 90.0) {
        row.angle_deg = -theta_deg;
    } else if (theta_deg > 90.0) {
        row.angle_deg = 180.0 - theta_deg;
    } else {
        row.angle_deg = 90.0;
    }
    const double cx = (width - 1) / 2.0;
    const double cy = (height - 1) / 2.0;
    const double th = deg_to_rad(theta_deg);
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double yc = (height - 1) - cy;
    if (std::abs(c) > 1e-6) {
        row.start_px = {(rho_px - yc * s) / c + cx, static_cast<double>(height - 1)};
    } else {
        row.start_px = {cx + rho_px * c, cy + rho_px * s};
    }
    return row;
}

std::vector<DetectedRow> hough_lines(const RasterImage& edges, const HoughParams& params)
{
    if (edges.channels() != 1) {
        throw InvalidArgument("hough_lines needs a single-channel edge map");
    }
    if (!(params.rho_res_px > 0.0) || !(params.theta_res_deg > 0.0)) {
        throw InvalidArgument("hough resolutions must be positive");
    }
    const int w = edges.width();
    const int h = edges.height();
    const double cx = (w - 1) / 2.0;
    const double cy = (h - 1) / 2.0;
    const int n_theta = static_cast<int>(std::lround(180.0 / params.theta_res_deg));
    const double max_rho = std::hypot(w, h) / 2.0 + 1.0;
    const int rho_half = static_cast<int>(std::ceil(max_rho / params.rho_res_px));
    const int n_rho = 2 * rho_half + 1;

    std::vector<double> cos_t(n_theta);
    std::vector<double> sin_t(n_theta);
    for (int t = 0; t < n_theta; ++t) {
        const double th = deg_to_rad(t * params.theta_res_deg);
        cos_t[t] = std::cos(th) / params.rho_res_px;
        sin_t[t] = std::sin(th) / params.rho_res_px;
    }

    std::vector<int> acc(static_cast<std::size_t>(n_theta) * n_rho, 0);
    bool any = false;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (edges.at(x, y) == 0) {
                continue;
            }
            any = true;
            const double xc = x - cx;
            const double yc = y - cy;
            for (int t = 0; t < n_theta; ++t) {
                const long r = std::lround(xc * cos_t[t] + yc * sin_t[t]) + rho_half;
                ++acc[static_cast<std::size_t>(t) * n_rho + r];
            }
        }
    }
    if (!any) {
        return {};
    }

    // Theta wraps at 180 degrees with rho negated.
    auto cell = [&](int t, int r, long& linear) -> int {
        if (t < 0) {
            t += n_theta;
            r = n_rho - 1 - r;
        } else if (t >= n_theta) {
            t -= n_theta;
            r = n_rho - 1 - r;
        }
        if (r < 0 || r >= n_rho) {
            linear = -1;
            return -1;
        }
        linear = static_cast<long>(t) * n_rho + r;
        return acc[static_cast<std::size_t>(linear)];
    };

    std::vector<DetectedRow> rows;
    for (int t = 0; t < n_theta; ++t) {
        for (int r = 0; r < n_rho; ++r) {
            const long self = static_cast<long>(t) * n_rho + r;
            const int v = acc[static_cast<std::size_t>(self)];
            if (v < params.votes_min || v == 0) {
                continue;
            }
            bool peak = true;
            for (int dt = -params.peak_radius_theta; dt <= params.peak_radius_theta && peak; ++dt) {
                for (int dr = -params.peak_radius_rho; dr <= params.peak_radius_rho; ++dr) {
                    if (dt == 0 && dr == 0) {
                        continue;
                    }
                    long other = 0;
                    const int u = cell(t + dt, r + dr, other);
                    if (u < 0 || other == self) {
                        continue;
                    }
                    if (u > v || (u == v && other < self)) {
                        peak = false;
                        break;
                    }
                }
            }
            if (!peak) {
                continue;
            }
            DetectedRow row = make_line(t * params.theta_res_deg, (r - rho_half) * params.rho_res_px, w, h, v);
            rows.push_back(row);
        }
    }

    for (auto& a : rows) {
        double best = 0.0;
        for (const auto& b : rows) {
            if (&a == &b || std::abs(a.theta_deg - b.theta_deg) > params.parallel_tol_deg) {
                continue;
            }
            const double gap = std::abs(a.distance_from_center_px - b.distance_from_center_px);
            if (gap > 0.0 && (best == 0.0 || gap < best)) {
                best = gap;
            }
        }
        a.inter_row_spacing_px = best;
    }

    std::stable_sort(rows.begin(), rows.end(), [](const DetectedRow& a, const DetectedRow& b) {
        if (a.votes != b.votes) {
            return a.votes > b.votes;
        }
        return a.distance_from_center_px < b.distance_from_center_px;
    });
    return rows;
}

std::optional<DetectedRow> select_row(const std::vector<DetectedRow>& rows)
{
    if (rows.empty()) {
        return std::nullopt;
    }
    const DetectedRow* best = &rows.front();
    for (const auto& r : rows) {
        const double d = std::abs(r.distance_from_center_px);
        const double bd = std::abs(best->distance_from_center_px);
        if (d < bd || (d == bd && std::abs(r.angle_deg) < std::abs(best->angle_deg))) {
            best = &r;
        }
    }
    return *best;
}

}  // namespace weedbot::vision
