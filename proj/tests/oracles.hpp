#pragma once

// Brute-force reference implementations shared by unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "weedbot/rng.hpp"
#include "weedbot/vision/contours.hpp"
#include "weedbot/vision/image.hpp"

namespace weedbot::oracle {

/// Random discs, rings and rectangles plus salt noise.
inline vision::RasterImage random_blobs(Rng& rng, int w, int h)
{
    vision::RasterImage img(w, h, 1, 0);
    const int blobs = 1 + static_cast<int>(rng() % 6);
    for (int b = 0; b < blobs; ++b) {
        const double cx = uniform(rng, 0.0, w);
        const double cy = uniform(rng, 0.0, h);
        const double r = uniform(rng, 1.0, 14.0);
        const bool disc = rng() % 2 == 0;
        const bool ring = rng() % 4 == 0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double dx = x - cx;
                const double dy = y - cy;
                bool in = disc ? dx * dx + dy * dy <= r * r : std::abs(dx) <= r && std::abs(dy) <= 0.6 * r;
                if (ring && disc && dx * dx + dy * dy < 0.3 * r * r) {
                    in = false;
                }
                if (in) {
                    img.at(x, y) = 255;
                }
            }
        }
    }
    for (int k = 0; k < w * h / 50; ++k) {
        img.at(static_cast<int>(rng() % w), static_cast<int>(rng() % h)) = 255;
    }
    return img;
}

struct Region {
    std::vector<vision::PixelPoint> pixels;   // 8-connected foreground component
    double area{0.0};                         // component plus everything it encloses
    double m10{0.0};
    double m01{0.0};
    double perimeter{0.0};                    // Moore trace length
};

/// Moore-neighbour trace. The walk ends when it is about to leave the start
/// pixel toward the same neighbour as its first step.
inline double moore_perimeter(const std::vector<int>& label, int w, int h, int id, vision::PixelPoint start)
{
    auto fg = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && label[y * w + x] == id; };
    // Neighbour offsets clockwise on screen (y down), beginning at west.
    const int ox[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
    const int oy[8] = {0, -1, -1, -1, 0, 1, 1, 1};
    auto index_of = [&](int dx, int dy) {
        for (int k = 0; k < 8; ++k) {
            if (ox[k] == dx && oy[k] == dy) {
                return k;
            }
        }
        return -1;
    };
    vision::PixelPoint c = start;
    vision::PixelPoint b{start.x - 1, start.y};
    vision::PixelPoint first_step{-1, -1};
    double length = 0.0;
    for (int guard = 0; guard < 16 * w * h; ++guard) {
        const int k0 = index_of(b.x - c.x, b.y - c.y);
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            const int j = (k0 + k) % 8;
            if (fg(c.x + ox[j], c.y + oy[j])) {
                found = j;
                break;
            }
        }
        if (found < 0) {
            return 0.0;
        }
        const int prev = (found + 7) % 8;
        const vision::PixelPoint n{c.x + ox[found], c.y + oy[found]};
        if (guard == 0) {
            first_step = n;
        } else if (c == start && n == first_step) {
            break;
        }
        length += (ox[found] != 0 && oy[found] != 0) ? std::sqrt(2.0) : 1.0;
        b = {c.x + ox[prev], c.y + oy[prev]};
        c = n;
    }
    return length;
}

/// Components by flood fill, enclosed area by an outside flood fill.
inline std::vector<Region> regions(const vision::RasterImage& img)
{
    const int w = img.width();
    const int h = img.height();
    std::vector<int> label(static_cast<std::size_t>(w * h), -1);
    std::vector<Region> out;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (img.at(x, y) == 0 || label[y * w + x] >= 0) {
                continue;
            }
            const int id = static_cast<int>(out.size());
            Region reg;
            std::vector<vision::PixelPoint> stack{{x, y}};
            label[y * w + x] = id;
            while (!stack.empty()) {
                const auto p = stack.back();
                stack.pop_back();
                reg.pixels.push_back(p);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = p.x + dx;
                        const int ny = p.y + dy;
                        if (nx >= 0 && ny >= 0 && nx < w && ny < h && img.at(nx, ny) != 0 && label[ny * w + nx] < 0) {
                            label[ny * w + nx] = id;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
            // Outside = 4-connected to the frame without crossing this component.
            const int pw = w + 2;
            const int ph = h + 2;
            std::vector<char> outside(static_cast<std::size_t>(pw * ph), 0);
            auto wall = [&](int px, int py) {
                const int ix = px - 1;
                const int iy = py - 1;
                return ix >= 0 && iy >= 0 && ix < w && iy < h && label[iy * w + ix] == id;
            };
            std::vector<vision::PixelPoint> st{{0, 0}};
            outside[0] = 1;
            while (!st.empty()) {
                const auto p = st.back();
                st.pop_back();
                const vision::PixelPoint nb[4] = {{p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1}, {p.x, p.y - 1}};
                for (const auto& n : nb) {
                    if (n.x < 0 || n.y < 0 || n.x >= pw || n.y >= ph || outside[n.y * pw + n.x] || wall(n.x, n.y)) {
                        continue;
                    }
                    outside[n.y * pw + n.x] = 1;
                    st.push_back(n);
                }
            }
            for (int yy = 0; yy < h; ++yy) {
                for (int xx = 0; xx < w; ++xx) {
                    if (!outside[(yy + 1) * pw + xx + 1]) {
                        reg.area += 1.0;
                        reg.m10 += xx;
                        reg.m01 += yy;
                    }
                }
            }
            out.push_back(std::move(reg));
        }
    }
    // Traces run after labelling so every component sees its final labels.
    for (std::size_t id = 0; id < out.size(); ++id) {
        out[id].perimeter = moore_perimeter(label, w, h, static_cast<int>(id), out[id].pixels.front());
    }
    return out;
}

}  // namespace weedbot::oracle
