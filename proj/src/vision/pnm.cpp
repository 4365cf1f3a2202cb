#include "weedbot/vision/pnm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include "weedbot/error.hpp"

namespace weedbot::vision {

void write_pnm(std::ostream& os, const RasterImage& image)
{
    os << (image.channels() == 3 ? "P6" : "P5") << '\n'
       << image.width() << ' ' << image.height() << '\n'
       << "255\n";
    const auto bytes = image.data();
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_pnm(const std::string& path, const RasterImage& image)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw InvalidArgument("cannot open " + path + " for writing");
    }
    write_pnm(os, image);
}

namespace {

int read_header_int(std::istream& is)
{
    int ch = is.peek();
    while (ch != EOF) {
        if (std::isspace(ch)) {
            is.get();
        } else if (ch == '#') {
            std::string comment;
            std::getline(is, comment);
        } else {
            break;
        }
        ch = is.peek();
    }
    int value = -1;
    if (!(is >> value)) {
        throw InvalidArgument("malformed PNM header");
    }
    return value;
}

}  // namespace

RasterImage read_pnm(std::istream& is)
{
    char magic[2]{};
    is.read(magic, 2);
    if (!is || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
        throw InvalidArgument("only binary P5/P6 images are supported");
    }
    const int channels = magic[1] == '6' ? 3 : 1;
    const int width = read_header_int(is);
    const int height = read_header_int(is);
    const int maxval = read_header_int(is);
    if (width <= 0 || height <= 0 || maxval != 255) {
        throw InvalidArgument("PNM must be non-empty with maxval 255");
    }
    is.get();  // single whitespace before the raster
    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height * channels);
    is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (is.gcount() != static_cast<std::streamsize>(data.size())) {
        throw InvalidArgument("truncated PNM raster");
    }
    return RasterImage(width, height, channels, std::move(data));
}

RasterImage read_pnm(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw InvalidArgument("cannot open " + path);
    }
    return read_pnm(is);
}

}  // namespace weedbot::vision
