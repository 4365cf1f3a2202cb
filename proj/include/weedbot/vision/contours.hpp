#pragma once

#include <vector>

#include "weedbot/geometry.hpp"
#include "weedbot/vision/image.hpp"

namespace weedbot::vision {

struct PixelPoint {
    int x{0};
    int y{0};
    bool operator==(const PixelPoint&) const = default;
};

enum class ContourClass { noise, weed, crop };

const char* to_string(ContourClass c);

struct Contour {
    /// Outer boundary walk, clockwise (image y down), starting at the first pixel in scan order.
    /// Pixels on one-pixel-wide spurs appear once per visit; the walk closes back on the first entry.
    std::vector<PixelPoint> boundary;
    /// Pixels enclosed by the outer boundary, holes included.
    double area_px2{0.0};
    /// Closed chain length: 1 per axial step, sqrt(2) per diagonal step.
    double perimeter_px{0.0};
    /// (m10 / m00, m01 / m00) of the enclosed region.
    Vec2 centroid;
    Rect bounds;
    bool touches_border{false};
    ContourClass cls{ContourClass::noise};
};

/// 8-connected components of the non-zero pixels, in scan order of their first pixel.
std::vector<Contour> find_contours(const RasterImage& binary);

struct ClassifierThresholds {
    double noise_frac{0.02};
    double crop_frac{0.6};
};

/// Labels each contour against the per-call maxima of area and perimeter:
/// noise if both metrics fall below noise_frac of their maxima, crop if both
/// exceed crop_frac, weed otherwise.
void classify_contours(std::vector<Contour>& contours, const ClassifierThresholds& thresholds = {});

}  // namespace weedbot::vision
