#include "weedbot/vision/contours.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "weedbot/error.hpp"

namespace weedbot::vision {

namespace {

// Clockwise on screen: E, SE, S, SW, W, NW, N, NE.
constexpr std::array<int, 8> kDx{1, 1, 0, -1, -1, -1, 0, 1};
constexpr std::array<int, 8> kDy{0, 1, 1, 1, 0, -1, -1, -1};

struct Component {
    std::vector<PixelPoint> pixels;
    Rect bounds;
};

void trace_boundary(const std::vector<int>& labels, int w, int h, int label, Contour& out)
{
    auto is_fg = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h && labels[static_cast<std::size_t>(y) * w + x] == label;
    };
    const PixelPoint start = out.boundary.front();
    PixelPoint p = start;
    int search = 4;
    int first_dir = -1;
    double length = 0.0;
    constexpr double kDiag = 1.4142135623730951;
    for (std::size_t guard = 0; guard < 8 * labels.size() + 8; ++guard) {
        int d = -1;
        for (int k = 0; k < 8; ++k) {
            const int cand = (search + k) % 8;
            if (is_fg(p.x + kDx[cand], p.y + kDy[cand])) {
                d = cand;
                break;
            }
        }
        if (d < 0) {
            break;  // isolated pixel
        }
        if (p == start && d == first_dir) {
            break;
        }
        if (first_dir < 0) {
            first_dir = d;
        }
        length += (d % 2 == 0) ? 1.0 : kDiag;
        p = {p.x + kDx[d], p.y + kDy[d]};
        out.boundary.push_back(p);
        search = (d % 2 == 0) ? (d + 6) % 8 : (d + 5) % 8;
    }
    // The walk ends back on the start pixel, which is already the first entry.
    if (out.boundary.size() > 1) {
        out.boundary.pop_back();
    }
    out.perimeter_px = length;
}

void fill_region(const Component& comp, Contour& out)
{
    const Rect& b = comp.bounds;
    const int pw = b.width + 2;
    const int ph = b.height + 2;
    // 0 = open, 1 = wall, 2 = reached from outside
    std::vector<std::uint8_t> grid(static_cast<std::size_t>(pw) * ph, 0);
    for (const auto& q : comp.pixels) {
        grid[static_cast<std::size_t>(q.y - b.y + 1) * pw + (q.x - b.x + 1)] = 1;
    }
    std::vector<int> stack{0};
    grid[0] = 2;
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const int x = i % pw;
        const int y = i / pw;
        const int nb[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
        for (const auto& n : nb) {
            if (n[0] < 0 || n[1] < 0 || n[0] >= pw || n[1] >= ph) {
                continue;
            }
            const int j = n[1] * pw + n[0];
            if (grid[j] == 0) {
                grid[j] = 2;
                stack.push_back(j);
            }
        }
    }
    double m00 = 0.0;
    double m10 = 0.0;
    double m01 = 0.0;
    for (int y = 1; y < ph - 1; ++y) {
        for (int x = 1; x < pw - 1; ++x) {
            if (grid[static_cast<std::size_t>(y) * pw + x] != 2) {
                m00 += 1.0;
                m10 += x - 1 + b.x;
                m01 += y - 1 + b.y;
            }
        }
    }
    out.area_px2 = m00;
    out.centroid = {m10 / m00, m01 / m00};
}

}  // namespace

const char* to_string(ContourClass c)
{
    switch (c) {
    case ContourClass::noise:
        return "noise";
    case ContourClass::weed:
        return "weed";
    case ContourClass::crop:
        return "crop";
    }
    return "?";
}

std::vector<Contour> find_contours(const RasterImage& binary)
{
    if (binary.channels() != 1) {
        throw InvalidArgument("find_contours needs a single-channel image");
    }
    const int w = binary.width();
    const int h = binary.height();
    std::vector<int> labels(static_cast<std::size_t>(w) * h, 0);
    std::vector<Contour> contours;
    int next_label = 0;
    std::vector<PixelPoint> queue;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (binary.at(x, y) == 0 || labels[static_cast<std::size_t>(y) * w + x] != 0) {
                continue;
            }
            const int label = ++next_label;
            Component comp;
            int x0 = x;
            int x1 = x;
            int y0 = y;
            int y1 = y;
            queue.assign(1, {x, y});
            labels[static_cast<std::size_t>(y) * w + x] = label;
            for (std::size_t qi = 0; qi < queue.size(); ++qi) {
                const PixelPoint q = queue[qi];
                x0 = std::min(x0, q.x);
                x1 = std::max(x1, q.x);
                y0 = std::min(y0, q.y);
                y1 = std::max(y1, q.y);
                for (int d = 0; d < 8; ++d) {
                    const int nx = q.x + kDx[d];
                    const int ny = q.y + kDy[d];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                        continue;
                    }
                    const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                    if (binary.at(nx, ny) != 0 && labels[j] == 0) {
                        labels[j] = label;
                        queue.push_back({nx, ny});
                    }
                }
            }
            comp.pixels = queue;
            comp.bounds = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};

            Contour c;
            c.bounds = comp.bounds;
            c.touches_border = x0 == 0 || y0 == 0 || x1 == w - 1 || y1 == h - 1;
            c.boundary.push_back({x, y});
            trace_boundary(labels, w, h, label, c);
            fill_region(comp, c);
            contours.push_back(std::move(c));
        }
    }
    return contours;
}

void classify_contours(std::vector<Contour>& contours, const ClassifierThresholds& thresholds)
{
    if (!(thresholds.noise_frac > 0.0) || !(thresholds.noise_frac < thresholds.crop_frac) ||
        !(thresholds.crop_frac < 1.0)) {
        throw InvalidArgument("classifier thresholds need 0 < noise_frac < crop_frac < 1");
    }
    double max_area = 0.0;
    double max_perim = 0.0;
    for (const auto& c : contours) {
        max_area = std::max(max_area, c.area_px2);
        max_perim = std::max(max_perim, c.perimeter_px);
    }
    for (auto& c : contours) {
        const bool small = c.area_px2 < thresholds.noise_frac * max_area &&
                           c.perimeter_px < thresholds.noise_frac * max_perim;
        const bool large = c.area_px2 > thresholds.crop_frac * max_area &&
                           c.perimeter_px > thresholds.crop_frac * max_perim;
        if (small) {
            c.cls = ContourClass::noise;
        } else if (large) {
            c.cls = ContourClass::crop;
        } else {
            c.cls = ContourClass::weed;
        }
    }
}

}  // namespace weedbot::vision
