#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "weedbot/vision/image.hpp"

namespace weedbot::vision {

/// Hexcone HSV with every channel on 0..255 (hue degrees scaled by 255/360).
RasterImage rgb_to_hsv(const RasterImage& rgb);

struct Hsv {
    std::uint8_t h{0};
    std::uint8_t s{0};
    std::uint8_t v{0};
};

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// 255 where every channel lies within [lo, hi] inclusive, else 0.
RasterImage hsv_threshold(const RasterImage& hsv, Hsv lo, Hsv hi);

/// Normalized 1-D Gaussian weights, `size` odd.
std::vector<double> gaussian_kernel(double sigma, int size);

/// Separable Gaussian blur. Borders reflect without repeating the edge
/// pixel (dcb|abcd|cba). One rounding step at the end.
RasterImage gaussian_blur(const RasterImage& image, double sigma, int kernel_size);

/// Horizontal box blur of real-valued length (partial end taps), same border rule.
RasterImage motion_blur(const RasterImage& image, double length_px);

/// Canny edge map (0/255) from an 8-bit single-channel image. Gradient
/// magnitude is the L2 norm of the raw 3x3 Sobel response; hysteresis uses
/// 8-connectivity.
RasterImage canny(const RasterImage& gray, double low_thresh, double high_thresh);

/// Rectangular structuring element of odd size, anchored at its center.
/// Odd-sized rectangle, or the ellipse inscribed in it.
struct StructuringElement {
    int width{3};
    int height{3};
    bool elliptical{false};

    /// Whether offset (dx, dy) from the center belongs to the element.
    [[nodiscard]] bool contains(int dx, int dy) const;
};

/// Max over the element; pixels outside the image are ignored.
RasterImage dilate(const RasterImage& binary, StructuringElement kernel = {});
/// Min over the element; pixels outside the image are ignored.
RasterImage erode(const RasterImage& binary, StructuringElement kernel = {});
/// Dilation followed by erosion.
RasterImage close(const RasterImage& binary, StructuringElement kernel = {});

}  // namespace weedbot::vision
