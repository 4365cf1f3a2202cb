#include "weedbot/vision/image.hpp"

#include "weedbot/error.hpp"

namespace weedbot::vision {

RasterImage::RasterImage(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels)
{
    if (width < 0 || height < 0 || (channels != 1 && channels != 3)) {
        throw InvalidArgument("image dimensions must be non-negative with 1 or 3 channels");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

RasterImage::RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data)
    : RasterImage(width, height, channels)
{
    if (data.size() != data_.size()) {
        throw InvalidArgument("pixel buffer length must equal width * height * channels");
    }
    data_ = std::move(data);
}

RasterImage crop(const RasterImage& image, const Rect& rect)
{
    if (rect.x < 0 || rect.y < 0 || rect.width < 0 || rect.height < 0 || rect.x + rect.width > image.width() ||
        rect.y + rect.height > image.height()) {
        throw InvalidArgument("crop rectangle outside image");
    }
    RasterImage out(rect.width, rect.height, image.channels());
    for (int y = 0; y < rect.height; ++y) {
        for (int x = 0; x < rect.width; ++x) {
            for (int c = 0; c < image.channels(); ++c) {
                out.at(x, y, c) = image.at(rect.x + x, rect.y + y, c);
            }
        }
    }
    return out;
}

RasterImage to_gray(const RasterImage& rgb)
{
    if (rgb.channels() == 1) {
        return rgb;
    }
    RasterImage out(rgb.width(), rgb.height(), 1);
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            const int v = 77 * rgb.at(x, y, 0) + 150 * rgb.at(x, y, 1) + 29 * rgb.at(x, y, 2);
            out.at(x, y) = static_cast<std::uint8_t>((v + 128) >> 8);
        }
    }
    return out;
}

}  // namespace weedbot::vision
