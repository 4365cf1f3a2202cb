#pragma once

#include <optional>
#include <vector>

#include "weedbot/geometry.hpp"
#include "weedbot/vision/image.hpp"

namespace weedbot::vision {

/// A straight line found in an edge map. Angles are measured from the image
/// vertical, counter-clockwise positive with the image top as "forward";
/// distances are signed and measured from the image center.
struct DetectedRow {
    Vec2 start_px;                       ///< where the line meets the bottom image row
    double angle_deg{0.0};               ///< in (-90, 90]
    double distance_from_center_px{0.0}; ///< signed perpendicular distance (rho)
    double inter_row_spacing_px{0.0};    ///< gap to the nearest parallel line, 0 if none
    double theta_deg{0.0};               ///< normal direction in [0, 180)
    int votes{0};

    /// Horizontal offset of the line along the image row through the center.
    [[nodiscard]] double lateral_offset_px() const;
};

struct HoughParams {
    double rho_res_px{1.0};
    double theta_res_deg{1.0};
    int votes_min{40};
    /// Half-size of the non-maximum window, in accumulator cells.
    int peak_radius_rho{4};
    int peak_radius_theta{3};
    /// Lines closer than this in angle count as parallel.
    double parallel_tol_deg{2.0};
};

/// Line (x - cx) cos(theta) + (y - cy) sin(theta) = rho in a width x height image.
DetectedRow make_line(double theta_deg, double rho_px, int width, int height, int votes = 0);

/// Standard (rho, theta) voting over non-zero pixels. Empty input yields an
/// empty list.
std::vector<DetectedRow> hough_lines(const RasterImage& edges, const HoughParams& params = {});

/// Line nearest the image center; ties go to the smaller |angle|.
std::optional<DetectedRow> select_row(const std::vector<DetectedRow>& rows);

}  // namespace weedbot::vision
