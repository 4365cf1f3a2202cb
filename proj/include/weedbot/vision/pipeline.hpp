#pragma once

#include <optional>
#include <vector>

#include "weedbot/geometry.hpp"
#include "weedbot/vision/contours.hpp"
#include "weedbot/vision/hough.hpp"
#include "weedbot/vision/image.hpp"
#include "weedbot/vision/kernels.hpp"
#include "weedbot/vision/render.hpp"

namespace weedbot::vision {

struct VisionConfig {
    Hsv green_lo{35, 80, 40};
    Hsv green_hi{85, 255, 255};
    double blur_sigma{1.4};
    int blur_kernel{5};
    double canny_low{50.0};
    double canny_high{150.0};
    StructuringElement close_kernel{3, 3};
    ClassifierThresholds classifier;
    /// Non-noise contours at least this large are crops, smaller ones weeds. The
    /// relative classifier alone would call the largest weed of a crop-free
    /// frame a crop, or a crop a weed when a merged blob inflates the maxima.
    double crop_min_area_px2{3000.0};
    /// Same for the smaller bounding-box side, which survives a broken edge ring.
    int crop_min_extent_px{60};
    /// Speckle below this area is never a weed target.
    double min_weed_area_px2{20.0};
    /// Weed fragments whose bounding boxes come this close are merged.
    int merge_gap_px{3};
    /// Weed candidates centered inside a crop's bounding box grown by this margin are never targeted.
    int crop_guard_px{0};
    /// Contours cut by the frame edge have unreliable centroids.
    bool reject_border_contours{true};
};

struct WeedDetection {
    std::vector<Vec2> centroids_px;   ///< weed centroids in full-image pixel coordinates
    std::vector<Contour> contours;    ///< classified contours kept for labeling, work-area coordinates
};

/// Threshold, blur, edge, close, contour and classify; returns weed centroids.
WeedDetection detect_weeds(const RasterImage& rgb, const Rect& work_area, const VisionConfig& config = {});
WeedDetection detect_weeds(const RasterImage& rgb, const VisionConfig& config = {});

struct RowDetectionConfig {
    Hsv green_lo{35, 80, 40};
    Hsv green_hi{85, 255, 255};
    /// Isotropic blur that merges the plants of a row into one smooth band
    /// whatever the row's angle; the blurred mask is cut at band_level.
    double band_blur_sigma{10.0};
    int band_blur_kernel{61};
    int band_level{20};
    /// Components smaller than this (weeds, noise) are dropped before edge detection.
    double min_component_area_px2{150.0};
    double canny_low{50.0};
    double canny_high{150.0};
    HoughParams hough{1.0, 0.25, 40, 4, 12, 2.0};
    double max_row_angle_deg{45.0};
    /// Unbridged components at least this large are plants; only they feed the centerline fit.
    double min_plant_area_px2{40.0};
    /// Edge pixels this close to a Hough line refine it by least squares.
    double refine_band_px{2.0};
    /// Edges of one band must agree within this angle to be paired.
    double pair_angle_tol_deg{6.0};
    double min_band_width_px{3.0};
    double max_band_width_px{40.0};
};

/// Crop-row centerlines in a forward view, found by pairing the two Hough
/// edges of each green band. Empty when no row is visible.
std::vector<DetectedRow> detect_rows(const RasterImage& rgb, const RowDetectionConfig& config = {});

struct LaserSpotConfig {
    Rgb color{0, 70, 255};
    int tolerance{45};
    double min_area_px2{3.0};
};

/// Centroid of the largest laser-colored blob.
std::optional<Vec2> detect_laser_spot(const RasterImage& rgb, const LaserSpotConfig& config = {});

/// Undoes a vertical mirror of an image `height` pixels tall.
Vec2 mirror_transform(const Vec2& px, int height);

/// Affine pixel-to-gantry map; the gantry origin sits at pixel (0, 0) plus an offset.
struct GantryCalibration {
    double mm_per_px_u{0.625};
    double mm_per_px_v{0.625};
    Vec2 offset_mm{0.0, 0.0};

    static GantryCalibration from_camera(const CameraModel& camera);
};

Vec2 pixel_to_gantry(const Vec2& px, const GantryCalibration& cal);
Vec2 gantry_to_pixel(const Vec2& mm, const GantryCalibration& cal);

}  // namespace weedbot::vision
