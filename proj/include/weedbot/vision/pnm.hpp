#pragma once

#include <iosfwd>
#include <string>

#include "weedbot/vision/image.hpp"

namespace weedbot::vision {

/// Binary PNM: P6 for 3-channel images, P5 for single channel. maxval 255.
void write_pnm(std::ostream& os, const RasterImage& image);
void write_pnm(const std::string& path, const RasterImage& image);

RasterImage read_pnm(std::istream& is);
RasterImage read_pnm(const std::string& path);

}  // namespace weedbot::vision
