#include "weedbot/vision/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "weedbot/error.hpp"

namespace weedbot::vision {

namespace {

int reflect101(int i, int n)
{
    if (n == 1) {
        return 0;
    }
    while (i < 0 || i >= n) {
        if (i < 0) {
            i = -i;
        }
        if (i >= n) {
            i = 2 * n - 2 - i;
        }
    }
    return i;
}

std::uint8_t saturate(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

void require_single_channel(const RasterImage& img, const char* op)
{
    if (img.channels() != 1) {
        throw InvalidArgument(std::string(op) + " needs a single-channel image");
    }
}

/// Separable filter with per-axis taps centered on offset 0; taps[i] applies at offset i - radius.
RasterImage separable(const RasterImage& img, const std::vector<double>& hx, const std::vector<double>& hy)
{
    const int w = img.width();
    const int h = img.height();
    const int ch = img.channels();
    const int rx = static_cast<int>(hx.size() / 2);
    const int ry = static_cast<int>(hy.size() / 2);
    // Border indices are resolved once per axis so the inner loops stay branch free.
    std::vector<int> xs(static_cast<std::size_t>(w + 2 * rx));
    for (int x = -rx; x < w + rx; ++x) {
        xs[x + rx] = reflect101(x, w) * ch;
    }
    std::vector<std::size_t> ys(static_cast<std::size_t>(h + 2 * ry));
    const std::size_t stride = static_cast<std::size_t>(w) * ch;
    for (int y = -ry; y < h + ry; ++y) {
        ys[y + ry] = static_cast<std::size_t>(reflect101(y, h)) * stride;
    }
    const auto src = img.data();
    std::vector<double> tmp(stride * h);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = src.data() + static_cast<std::size_t>(y) * stride;
        double* dst = tmp.data() + static_cast<std::size_t>(y) * stride;
        for (int x = 0; x < w; ++x) {
            const int* idx = xs.data() + x;
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (std::size_t k = 0; k < hx.size(); ++k) {
                    acc += hx[k] * row[idx[k] + c];
                }
                dst[x * ch + c] = acc;
            }
        }
    }
    RasterImage out(w, h, ch);
    auto dst = out.data();
    std::vector<double> acc(stride);
    for (int y = 0; y < h; ++y) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t k = 0; k < hy.size(); ++k) {
            const double* line = tmp.data() + ys[y + k];
            const double t = hy[k];
            for (std::size_t i = 0; i < stride; ++i) {
                acc[i] += t * line[i];
            }
        }
        std::uint8_t* o = dst.data() + static_cast<std::size_t>(y) * stride;
        for (std::size_t i = 0; i < stride; ++i) {
            o[i] = saturate(acc[i]);
        }
    }
    return out;
}

}  // namespace

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b)
{
    const int mx = std::max({r, g, b});
    const int mn = std::min({r, g, b});
    const int d = mx - mn;
    Hsv out;
    out.v = static_cast<std::uint8_t>(mx);
    out.s = mx == 0 ? 0 : saturate(255.0 * d / mx);
    if (d == 0) {
        out.h = 0;
        return out;
    }
    double deg = 0.0;
    if (mx == r) {
        deg = 60.0 * (static_cast<double>(g) - b) / d;
    } else if (mx == g) {
        deg = 60.0 * (static_cast<double>(b) - r) / d + 120.0;
    } else {
        deg = 60.0 * (static_cast<double>(r) - g) / d + 240.0;
    }
    if (deg < 0.0) {
        deg += 360.0;
    }
    const long scaled = std::lround(deg * 255.0 / 360.0);
    out.h = static_cast<std::uint8_t>(scaled >= 255 ? 0 : scaled);
    return out;
}

RasterImage rgb_to_hsv(const RasterImage& rgb)
{
    if (rgb.channels() != 3) {
        throw InvalidArgument("rgb_to_hsv needs a 3-channel image");
    }
    RasterImage out(rgb.width(), rgb.height(), 3);
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            const Hsv p = rgb_to_hsv(rgb.at(x, y, 0), rgb.at(x, y, 1), rgb.at(x, y, 2));
            out.at(x, y, 0) = p.h;
            out.at(x, y, 1) = p.s;
            out.at(x, y, 2) = p.v;
        }
    }
    return out;
}

RasterImage hsv_threshold(const RasterImage& hsv, Hsv lo, Hsv hi)
{
    if (hsv.channels() != 3) {
        throw InvalidArgument("hsv_threshold needs a 3-channel image");
    }
    RasterImage out(hsv.width(), hsv.height(), 1);
    for (int y = 0; y < hsv.height(); ++y) {
        for (int x = 0; x < hsv.width(); ++x) {
            const auto h = hsv.at(x, y, 0);
            const auto s = hsv.at(x, y, 1);
            const auto v = hsv.at(x, y, 2);
            const bool in = h >= lo.h && h <= hi.h && s >= lo.s && s <= hi.s && v >= lo.v && v <= hi.v;
            out.at(x, y) = in ? 255 : 0;
        }
    }
    return out;
}

std::vector<double> gaussian_kernel(double sigma, int size)
{
    if (size < 1 || size % 2 == 0 || !(sigma > 0.0)) {
        throw InvalidArgument("gaussian kernel needs odd size and positive sigma");
    }
    const int r = size / 2;
    std::vector<double> k(size);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k[i + r];
    }
    for (auto& v : k) {
        v /= sum;
    }
    return k;
}

RasterImage gaussian_blur(const RasterImage& image, double sigma, int kernel_size)
{
    const auto k = gaussian_kernel(sigma, kernel_size);
    return separable(image, k, k);
}

RasterImage motion_blur(const RasterImage& image, double length_px)
{
    if (!(length_px > 1.0)) {
        return image;
    }
    const double half = length_px / 2.0;
    const int r = static_cast<int>(std::ceil(half - 0.5));
    // Interior taps all weigh 1/length; the two end taps carry the fractional remainder.
    const double edge = half - (r - 0.5);
    const int w = image.width();
    const int h = image.height();
    const int ch = image.channels();
    std::vector<int> xs(static_cast<std::size_t>(w + 2 * r));
    for (int x = -r; x < w + r; ++x) {
        xs[x + r] = reflect101(x, w) * ch;
    }
    const std::size_t stride = static_cast<std::size_t>(w) * ch;
    const auto src = image.data();
    RasterImage out(w, h, ch);
    auto dst = out.data();
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = src.data() + static_cast<std::size_t>(y) * stride;
        std::uint8_t* o = dst.data() + static_cast<std::size_t>(y) * stride;
        for (int c = 0; c < ch; ++c) {
            long inner = 0;
            for (int k = 1; k < 2 * r; ++k) {
                inner += row[xs[k] + c];
            }
            for (int x = 0; x < w; ++x) {
                const int ends = row[xs[x] + c] + row[xs[x + 2 * r] + c];
                o[x * ch + c] = saturate((static_cast<double>(inner) + edge * ends) / length_px);
                if (x + 1 < w) {
                    inner += row[xs[x + 2 * r] + c] - row[xs[x + 1] + c];
                }
            }
        }
    }
    return out;
}

RasterImage canny(const RasterImage& gray, double low_thresh, double high_thresh)
{
    require_single_channel(gray, "canny");
    const int w = gray.width();
    const int h = gray.height();
    std::vector<float> mag(static_cast<std::size_t>(w) * h, 0.0f);
    std::vector<std::uint8_t> dir(static_cast<std::size_t>(w) * h, 0);
    auto px = [&](int x, int y) { return static_cast<int>(gray.at(reflect101(x, w), reflect101(y, h))); };

    constexpr double kTan22 = 0.41421356237309503;
    constexpr double kTan67 = 2.414213562373095;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                           (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
            const int gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                           (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            mag[i] = static_cast<float>(std::hypot(gx, gy));
            const double ax = std::abs(gx);
            const double ay = std::abs(gy);
            if (ay <= ax * kTan22) {
                dir[i] = 0;
            } else if (ay >= ax * kTan67) {
                dir[i] = 2;
            } else {
                dir[i] = (gx > 0) == (gy > 0) ? 1 : 3;
            }
        }
    }

    auto m = [&](int x, int y) -> float {
        return (x < 0 || y < 0 || x >= w || y >= h) ? 0.0f : mag[static_cast<std::size_t>(y) * w + x];
    };
    // 0 = keep strong, 1 = weak candidate, 2 = not an edge
    std::vector<std::uint8_t> cls(static_cast<std::size_t>(w) * h, 2);
    std::vector<int> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const float v = mag[i];
            if (v <= low_thresh) {
                continue;
            }
            float prev = 0.0f;
            float next = 0.0f;
            switch (dir[i]) {
            case 0:
                prev = m(x - 1, y);
                next = m(x + 1, y);
                break;
            case 2:
                prev = m(x, y - 1);
                next = m(x, y + 1);
                break;
            case 1:
                prev = m(x - 1, y - 1);
                next = m(x + 1, y + 1);
                break;
            default:
                prev = m(x + 1, y - 1);
                next = m(x - 1, y + 1);
                break;
            }
            if (v > prev && v >= next) {
                if (v > high_thresh) {
                    cls[i] = 0;
                    stack.push_back(static_cast<int>(i));
                } else {
                    cls[i] = 1;
                }
            }
        }
    }

    RasterImage out(w, h, 1);
    for (int i : stack) {
        out.at(i % w, i / w) = 255;
    }
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const int x = i % w;
        const int y = i / w;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx;
                const int ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                    continue;
                }
                const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                if (cls[j] == 1) {
                    cls[j] = 0;
                    out.at(nx, ny) = 255;
                    stack.push_back(static_cast<int>(j));
                }
            }
        }
    }
    return out;
}

namespace {

template <typename Pick>
RasterImage rank_filter(const RasterImage& binary, StructuringElement k, Pick pick)
{
    require_single_channel(binary, "morphology");
    if (k.width < 1 || k.height < 1 || k.width % 2 == 0 || k.height % 2 == 0) {
        throw InvalidArgument("structuring element must have odd positive size");
    }
    const int w = binary.width();
    const int h = binary.height();
    const int rx = k.width / 2;
    const int ry = k.height / 2;
    if (k.elliptical) {
        // Horizontal half-extent of the element on each of its rows.
        std::vector<int> span(static_cast<std::size_t>(k.height), -1);
        for (int dy = -ry; dy <= ry; ++dy) {
            for (int dx = 0; dx <= rx && k.contains(dx, dy); ++dx) {
                span[static_cast<std::size_t>(dy + ry)] = dx;
            }
        }
        // Per-row prefix counts of pixels equal to the extreme `pick` favours,
        // so each element row is tested in constant time.
        const std::uint8_t extreme = pick(std::uint8_t{0}, std::uint8_t{255});
        const std::uint8_t other = extreme == 255 ? 0 : 255;
        for (auto v : binary.data()) {
            if (v != 0 && v != 255) {
                throw InvalidArgument("elliptical morphology needs a binary image");
            }
        }
        const auto stride = static_cast<std::size_t>(w + 1);
        std::vector<int> prefix(stride * static_cast<std::size_t>(h), 0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                prefix[y * stride + x + 1] = prefix[y * stride + x] + (binary.at(x, y) == extreme ? 1 : 0);
            }
        }
        RasterImage out(w, h, 1, other);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                for (int dy = -ry; dy <= ry; ++dy) {
                    const int ny = y + dy;
                    const int sx = span[static_cast<std::size_t>(dy + ry)];
                    if (ny < 0 || ny >= h || sx < 0) {
                        continue;
                    }
                    const int x0 = std::max(0, x - sx);
                    const int x1 = std::min(w - 1, x + sx);
                    if (prefix[ny * stride + x1 + 1] - prefix[ny * stride + x0] > 0) {
                        out.at(x, y) = extreme;
                        break;
                    }
                }
            }
        }
        return out;
    }
    RasterImage tmp(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = binary.at(x, y);
            for (int dx = -rx; dx <= rx; ++dx) {
                const int nx = x + dx;
                if (nx >= 0 && nx < w) {
                    v = pick(v, binary.at(nx, y));
                }
            }
            tmp.at(x, y) = v;
        }
    }
    RasterImage out(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = tmp.at(x, y);
            for (int dy = -ry; dy <= ry; ++dy) {
                const int ny = y + dy;
                if (ny >= 0 && ny < h) {
                    v = pick(v, tmp.at(x, ny));
                }
            }
            out.at(x, y) = v;
        }
    }
    return out;
}

}  // namespace

bool StructuringElement::contains(int dx, int dy) const
{
    const int rx = width / 2;
    const int ry = height / 2;
    if (std::abs(dx) > rx || std::abs(dy) > ry) {
        return false;
    }
    if (!elliptical) {
        return true;
    }
    const double ex = dx / (rx + 0.5);
    const double ey = dy / (ry + 0.5);
    return ex * ex + ey * ey <= 1.0;
}

RasterImage dilate(const RasterImage& binary, StructuringElement kernel)
{
    return rank_filter(binary, kernel, [](std::uint8_t a, std::uint8_t b) { return std::max(a, b); });
}

RasterImage erode(const RasterImage& binary, StructuringElement kernel)
{
    return rank_filter(binary, kernel, [](std::uint8_t a, std::uint8_t b) { return std::min(a, b); });
}

RasterImage close(const RasterImage& binary, StructuringElement kernel)
{
    return erode(dilate(binary, kernel), kernel);
}

}  // namespace weedbot::vision
