#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "weedbot/error.hpp"
#include "weedbot/geometry.hpp"
#include "weedbot/rng.hpp"
#include "weedbot/vision/image.hpp"
#include "weedbot/vision/kernels.hpp"
#include "weedbot/vision/pnm.hpp"

using namespace weedbot;
using namespace weedbot::vision;

namespace {

RasterImage random_image(Rng& rng, int w, int h, int ch)
{
    RasterImage img(w, h, ch);
    for (auto& v : img.data()) {
        v = static_cast<std::uint8_t>(rng() & 0xff);
    }
    return img;
}

int mirror(int i, int n)
{
    // dcb|abcd|cba for kernels shorter than the image.
    if (i < 0) {
        return -i;
    }
    if (i >= n) {
        return 2 * (n - 1) - i;
    }
    return i;
}

}  // namespace

TEST(Hsv, MatchesFloatingPointFormula)
{
    Rng rng(mix_seed(1, 2));
    for (int i = 0; i < 5000; ++i) {
        const int r = static_cast<int>(rng() & 0xff);
        const int g = static_cast<int>(rng() & 0xff);
        const int b = static_cast<int>(rng() & 0xff);
        const auto p = rgb_to_hsv(static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                  static_cast<std::uint8_t>(b));
        const double rf = r / 255.0;
        const double gf = g / 255.0;
        const double bf = b / 255.0;
        const double mx = std::max({rf, gf, bf});
        const double mn = std::min({rf, gf, bf});
        EXPECT_EQ(p.v, std::max({r, g, b}));
        const double s = mx > 0 ? (mx - mn) / mx : 0.0;
        EXPECT_NEAR(p.s, s * 255.0, 0.5 + 1e-9);
        if (mx == mn) {
            EXPECT_EQ(p.h, 0);
            continue;
        }
        double hdeg = 0.0;
        if (mx == rf) {
            hdeg = std::fmod(60.0 * (gf - bf) / (mx - mn) + 360.0, 360.0);
        } else if (mx == gf) {
            hdeg = 60.0 * (bf - rf) / (mx - mn) + 120.0;
        } else {
            hdeg = 60.0 * (rf - gf) / (mx - mn) + 240.0;
        }
        const double expect = hdeg * 255.0 / 360.0;
        double diff = std::abs(p.h - expect);
        diff = std::min(diff, 255.0 - diff);
        EXPECT_LE(diff, 0.5 + 1e-9) << r << ',' << g << ',' << b;
    }
}

TEST(Hsv, ThresholdIsInclusive)
{
    RasterImage hsv(3, 1, 3, 0);
    hsv.at(0, 0, 0) = 35;
    hsv.at(0, 0, 1) = 80;
    hsv.at(0, 0, 2) = 40;
    hsv.at(1, 0, 0) = 34;
    hsv.at(1, 0, 1) = 200;
    hsv.at(1, 0, 2) = 200;
    hsv.at(2, 0, 0) = 85;
    hsv.at(2, 0, 1) = 255;
    hsv.at(2, 0, 2) = 255;
    const auto m = hsv_threshold(hsv, {35, 80, 40}, {85, 255, 255});
    EXPECT_EQ(m.at(0, 0), 255);
    EXPECT_EQ(m.at(1, 0), 0);
    EXPECT_EQ(m.at(2, 0), 255);
}

TEST(Gaussian, KernelIsNormalizedAndSymmetric)
{
    const auto k = gaussian_kernel(1.4, 5);
    ASSERT_EQ(k.size(), 5u);
    double sum = 0.0;
    for (double v : k) {
        sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(k[0], k[4]);
    EXPECT_DOUBLE_EQ(k[1], k[3]);
    const double ratio = std::exp(-1.0 / (2.0 * 1.4 * 1.4));
    EXPECT_NEAR(k[1] / k[2], ratio, 1e-12);
}

TEST(Gaussian, BlurMatchesDirect2dConvolution)
{
    Rng rng(mix_seed(1, 3));
    const auto img = random_image(rng, 23, 17, 1);
    const auto k = gaussian_kernel(1.4, 5);
    const auto out = gaussian_blur(img, 1.4, 5);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (int j = -2; j <= 2; ++j) {
                for (int i = -2; i <= 2; ++i) {
                    acc += k[i + 2] * k[j + 2] * img.at(mirror(x + i, img.width()), mirror(y + j, img.height()));
                }
            }
            EXPECT_LE(std::abs(out.at(x, y) - acc), 0.5 + 1e-9);
        }
    }
}

TEST(Gaussian, ConstantImageIsUnchanged)
{
    RasterImage img(9, 9, 3, 77);
    EXPECT_EQ(gaussian_blur(img, 2.0, 7), img);
}

TEST(MotionBlur, BoxAverageAlongRows)
{
    RasterImage img(10, 2, 1, 0);
    img.at(5, 0) = 200;
    const auto out = motion_blur(img, 5.0);
    int sum = 0;
    for (int x = 0; x < 10; ++x) {
        sum += out.at(x, 0);
        EXPECT_EQ(out.at(x, 1), 0);
    }
    EXPECT_EQ(sum, 200);
    EXPECT_EQ(out.at(5, 0), 40);
    EXPECT_EQ(motion_blur(img, 1.0), img);
}

TEST(MotionBlur, MatchesTapOracleForFractionalLengths)
{
    Rng rng(mix_seed(21, 4));
    const auto img = random_image(rng, 31, 5, 3);
    auto reflect = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); };
    for (double len : {1.5, 2.0, 3.7, 6.25, 22.5, 40.0}) {
        const double half = len / 2.0;
        const auto out = motion_blur(img, len);
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                for (int c = 0; c < 3; ++c) {
                    // Each tap weighs the overlap of its unit cell with [-half, half].
                    double acc = 0.0;
                    for (int k = -40; k <= 40; ++k) {
                        const double wgt = std::max(0.0, std::min(k + 0.5, half) - std::max(k - 0.5, -half)) / len;
                        if (wgt > 0.0) {
                            acc += wgt * img.at(reflect(x + k, img.width()), y, c);
                        }
                    }
                    EXPECT_NEAR(out.at(x, y, c), acc, 0.5 + 1e-9) << len << ' ' << x << ' ' << y;
                }
            }
        }
    }
}

TEST(Morphology, MatchesBruteForce)
{
    Rng rng(mix_seed(1, 4));
    RasterImage img(30, 20, 1, 0);
    for (auto& v : img.data()) {
        v = (rng() % 5 == 0) ? 255 : 0;
    }
    const StructuringElement k{5, 3};
    const auto d = dilate(img, k);
    const auto e = erode(img, k);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            int mx = 0;
            int mn = 255;
            for (int j = -1; j <= 1; ++j) {
                for (int i = -2; i <= 2; ++i) {
                    if (img.contains(x + i, y + j)) {
                        mx = std::max<int>(mx, img.at(x + i, y + j));
                        mn = std::min<int>(mn, img.at(x + i, y + j));
                    }
                }
            }
            EXPECT_EQ(d.at(x, y), mx);
            EXPECT_EQ(e.at(x, y), mn);
        }
    }
    EXPECT_EQ(close(img, k), erode(dilate(img, k), k));
}

TEST(Morphology, EllipticalMatchesBruteForce)
{
    Rng rng(mix_seed(1, 6));
    RasterImage img(40, 30, 1, 0);
    for (auto& v : img.data()) {
        v = (rng() % 7 == 0) ? 255 : 0;
    }
    const StructuringElement k{9, 7, true};
    EXPECT_TRUE(k.contains(4, 0));
    EXPECT_TRUE(k.contains(0, 3));
    EXPECT_FALSE(k.contains(4, 3));
    const auto d = dilate(img, k);
    const auto e = erode(img, k);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            int mx = 0;
            int mn = 255;
            for (int j = -3; j <= 3; ++j) {
                for (int i = -4; i <= 4; ++i) {
                    const double ex = i / 4.5;
                    const double ey = j / 3.5;
                    if (ex * ex + ey * ey <= 1.0 && img.contains(x + i, y + j)) {
                        mx = std::max<int>(mx, img.at(x + i, y + j));
                        mn = std::min<int>(mn, img.at(x + i, y + j));
                    }
                }
            }
            EXPECT_EQ(d.at(x, y), mx);
            EXPECT_EQ(e.at(x, y), mn);
        }
    }
    RasterImage gray(5, 5, 1, 100);
    EXPECT_THROW(dilate(gray, k), InvalidArgument);
}

TEST(Canny, DiscEdgesLieOnBoundary)
{
    const int n = 101;
    const double cx = 50.3;
    const double cy = 49.6;
    const double r = 30.0;
    RasterImage img(n, n, 1, 0);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            if (std::hypot(x - cx, y - cy) <= r) {
                img.at(x, y) = 255;
            }
        }
    }
    const auto edges = canny(img, 50.0, 150.0);
    int count = 0;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            if (edges.at(x, y) != 0) {
                ++count;
                EXPECT_LE(std::abs(std::hypot(x - cx, y - cy) - r), 1.0) << x << ',' << y;
            }
        }
    }
    // A closed ring of roughly one pixel width.
    EXPECT_GT(count, static_cast<int>(2.0 * kPi * r * 0.9));
    EXPECT_LT(count, static_cast<int>(2.0 * kPi * r * 1.6));
}

TEST(Canny, FlatImageHasNoEdges)
{
    const RasterImage flat(20, 20, 1, 128);
    const auto e = canny(flat, 50.0, 150.0);
    for (auto v : e.data()) {
        EXPECT_EQ(v, 0);
    }
    EXPECT_THROW(canny(RasterImage(4, 4, 3), 1.0, 2.0), InvalidArgument);
}

TEST(Image, GrayAndCrop)
{
    RasterImage rgb(4, 3, 3, 0);
    rgb.at(1, 1, 0) = 255;
    rgb.at(1, 1, 1) = 255;
    rgb.at(1, 1, 2) = 255;
    const auto g = to_gray(rgb);
    EXPECT_EQ(g.channels(), 1);
    EXPECT_EQ(g.at(1, 1), 255);
    EXPECT_EQ(g.at(0, 0), 0);
    const auto c = crop(rgb, {1, 1, 2, 2});
    EXPECT_EQ(c.width(), 2);
    EXPECT_EQ(c.at(0, 0, 0), 255);
}

TEST(Pnm, RoundTripIsByteExact)
{
    Rng rng(mix_seed(1, 5));
    for (int ch : {1, 3}) {
        const auto img = random_image(rng, 13, 7, ch);
        std::stringstream ss;
        write_pnm(ss, img);
        const std::string bytes = ss.str();
        EXPECT_EQ(bytes.substr(0, 2), ch == 1 ? "P5" : "P6");
        std::stringstream in(bytes);
        EXPECT_EQ(read_pnm(in), img);
        std::stringstream again;
        std::stringstream reread(bytes);
        write_pnm(again, read_pnm(reread));
        EXPECT_EQ(again.str(), bytes);
    }
}

TEST(Pnm, RejectsGarbage)
{
    std::stringstream ss("P3\n1 1\n255\n0 0 0\n");
    EXPECT_THROW(read_pnm(ss), std::exception);
}
