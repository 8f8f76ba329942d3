#include <gtest/gtest.h>

#include "limerefine/explainer.hpp"
#include "limerefine/mask_ops.hpp"
#include "limerefine/overlay.hpp"
#include "support.hpp"

using namespace limerefine;
using lrtest::Rng;

namespace {

bool pixel_equal(const RgbImage& a, const RgbImage& b, int x, int y) {
    const auto* p = a.pixel(x, y);
    const auto* q = b.pixel(x, y);
    return p[0] == q[0] && p[1] == q[1] && p[2] == q[2];
}

}  // namespace

TEST(Overlay, GrayBase) {
    GrayImage img(3, 1);
    img[0] = 0.0f, img[1] = 0.5f, img[2] = 1.0f;
    const RgbImage rgb = gray_to_rgb(img);
    EXPECT_EQ(rgb.rgb, (std::vector<std::uint8_t>{0, 0, 0, 128, 128, 128, 255, 255, 255}));
}

TEST(Overlay, NoPositiveSegmentsLeavesBase) {
    Rng rng(3);
    const GrayImage img = lrtest::random_image(12, 9, rng);
    const SegmentMap seg = lrtest::random_segments(12, 9, 4, rng);
    const Heatmap hm{{-0.1, 0.0, -0.4, -0.2}, 0.0, 0};
    const RgbImage out = render_overlay(img, hm, seg, 3);
    EXPECT_EQ(out.width, 12);
    EXPECT_EQ(out.height, 9);
    EXPECT_EQ(out, gray_to_rgb(img));
}

TEST(Overlay, OnlyTopSegmentsChange) {
    Rng rng(11);
    for (int t = 0; t < 30; ++t) {
        const int w = rng.integer(4, 30), h = rng.integer(4, 30);
        const GrayImage img = lrtest::random_image(w, h, rng);
        const int d = rng.integer(1, 10);
        const SegmentMap seg = lrtest::random_segments(w, h, d, rng);
        Heatmap hm;
        for (int s = 0; s < d; ++s) hm.importances.push_back(rng.uniform(-1, 1));
        const std::size_t n = static_cast<std::size_t>(rng.integer(1, d));
        const auto top = top_segments(hm, n);
        const RgbImage base = gray_to_rgb(img), out = render_overlay(img, hm, seg, n);
        ASSERT_EQ(out.width, w);
        ASSERT_EQ(out.height, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const bool chosen = std::find(top.begin(), top.end(), seg.label(x, y)) != top.end();
                if (!chosen) EXPECT_TRUE(pixel_equal(out, base, x, y));
            }
    }
}

TEST(Overlay, TintsInteriorGreen) {
    GrayImage img(8, 8, 0.5f);
    std::vector<int> labels(64, 0);
    for (int y = 2; y < 6; ++y)
        for (int x = 2; x < 6; ++x) labels[y * 8 + x] = 1;
    const SegmentMap seg(8, 8, labels);
    const Heatmap hm{{-0.5, 0.7}, 0.0, 0};
    const RgbImage out = render_overlay(img, hm, seg, 1);
    const auto* inner = out.pixel(3, 3);
    EXPECT_GT(inner[1], inner[0]);
    EXPECT_EQ(inner[0], inner[2]);
    const auto* edge = out.pixel(2, 2);
    EXPECT_EQ(edge[2], 0);  // boundary colour
    EXPECT_TRUE(pixel_equal(out, gray_to_rgb(img), 0, 0));
}

TEST(Overlay, BrainOutline) {
    const GrayImage img(16, 16, 0.2f);
    const SegmentMap seg(16, 16, std::vector<int>(256, 0));
    const Heatmap hm{{0.0}, 0.0, 0};
    const BrainMaskResult bm{lrtest::disk_mask(16, 5), DetectorKind::Otsu, std::nullopt};
    const RgbImage out = render_overlay(img, hm, seg, 1, &bm);
    const BinaryMask outline = inner_boundary(bm.mask);
    ASSERT_GT(outline.area(), 0u);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            const auto* p = out.pixel(x, y);
            if (outline.at(x, y)) EXPECT_EQ(p[2], 255);
            else EXPECT_TRUE(pixel_equal(out, gray_to_rgb(img), x, y));
        }
}

TEST(Overlay, ShapeChecks) {
    const GrayImage img(4, 4, 0.2f);
    const SegmentMap seg(4, 4, std::vector<int>(16, 0));
    EXPECT_THROW_CODE(ErrorCode::ShapeMismatch, render_overlay(GrayImage(5, 4), Heatmap{{0.1}, 0, 0}, seg, 1));
    EXPECT_THROW_CODE(ErrorCode::ShapeMismatch, render_overlay(img, Heatmap{{0.1, 0.2}, 0, 0}, seg, 1));
}
