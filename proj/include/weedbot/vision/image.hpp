#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace weedbot::vision {

/// 8-bit raster, row-major, interleaved channels (1 = gray/binary, 3 = RGB or HSV).
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, int channels, std::uint8_t fill = 0);
    RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data);

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] int channels() const { return channels_; }
    [[nodiscard]] bool empty() const { return data_.empty(); }
    [[nodiscard]] bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    [[nodiscard]] std::uint8_t at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }

    [[nodiscard]] std::span<const std::uint8_t> data() const { return data_; }
    std::span<std::uint8_t> data() { return data_; }

    bool operator==(const RasterImage&) const = default;

private:
    [[nodiscard]] std::size_t index(int x, int y, int c) const
    {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_{0};
    int height_{0};
    int channels_{1};
    std::vector<std::uint8_t> data_;
};

struct Rect {
    int x{0};
    int y{0};
    int width{0};
    int height{0};

    [[nodiscard]] bool contains(int px, int py) const
    {
        return px >= x && py >= y && px < x + width && py < y + height;
    }
};

RasterImage crop(const RasterImage& image, const Rect& rect);

/// Luma (BT.601 integer weights) of an RGB image.
RasterImage to_gray(const RasterImage& rgb);

}  // namespace weedbot::vision
