#include "limerefine/overlay.hpp"

#include <algorithm>
#include <cmath>

#include "limerefine/error.hpp"
#include "limerefine/explainer.hpp"
#include "limerefine/mask_ops.hpp"

namespace limerefine {

namespace {

constexpr double kMinAlpha = 0.2;
constexpr double kAlphaRange = 0.5;
constexpr std::uint8_t kBoundary[3] = {255, 255, 0};
constexpr std::uint8_t kBrainOutline[3] = {0, 0, 255};

void paint(std::uint8_t* px, const std::uint8_t (&c)[3]) {
    px[0] = c[0];
    px[1] = c[1];
    px[2] = c[2];
}

}  // namespace

RgbImage gray_to_rgb(const GrayImage& img) {
    RgbImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const auto g = static_cast<std::uint8_t>(std::lround(img.at(x, y) * 255.0f));
            std::uint8_t* p = out.pixel(x, y);
            p[0] = p[1] = p[2] = g;
        }
    }
    return out;
}

RgbImage render_overlay(const GrayImage& img, const Heatmap& hm, const SegmentMap& seg,
                        std::size_t n, const BrainMaskResult* bm) {
    if (!img.same_shape(seg.width(), seg.height())) {
        throw Error(ErrorCode::ShapeMismatch, "image and segment map differ in size");
    }
    if (hm.num_segments() != seg.num_segments()) {
        throw Error(ErrorCode::ShapeMismatch, "heatmap and segment map disagree on segment count");
    }
    if (bm && (bm->mask.width() != img.width() || bm->mask.height() != img.height())) {
        throw Error(ErrorCode::ShapeMismatch, "brain mask and image differ in size");
    }

    RgbImage out = gray_to_rgb(img);
    const auto top = n > 0 ? top_segments(hm, n) : std::vector<int>{};

    std::vector<std::uint8_t> selected(static_cast<std::size_t>(seg.num_segments()), 0);
    double max_abs = 0.0;
    for (int s : top) {
        selected[static_cast<std::size_t>(s)] = 1;
        max_abs = std::max(max_abs, std::abs(hm.importances[static_cast<std::size_t>(s)]));
    }

    const int w = img.width();
    const int h = img.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int s = seg.label(x, y);
            if (!selected[static_cast<std::size_t>(s)]) continue;
            std::uint8_t* p = out.pixel(x, y);

            bool boundary = false;
            if (x > 0 && seg.label(x - 1, y) != s) boundary = true;
            if (x + 1 < w && seg.label(x + 1, y) != s) boundary = true;
            if (y > 0 && seg.label(x, y - 1) != s) boundary = true;
            if (y + 1 < h && seg.label(x, y + 1) != s) boundary = true;
            if (boundary) {
                paint(p, kBoundary);
                continue;
            }

            const double imp = hm.importances[static_cast<std::size_t>(s)];
            const double alpha = kMinAlpha + kAlphaRange * std::abs(imp) / max_abs;
            const int channel = imp >= 0.0 ? 1 : 0;  // green for support, red against
            for (int c = 0; c < 3; ++c) {
                const double target = c == channel ? 255.0 : 0.0;
                p[c] = static_cast<std::uint8_t>(std::lround((1.0 - alpha) * p[c] + alpha * target));
            }
        }
    }

    if (bm) {
        const BinaryMask outline = inner_boundary(bm->mask);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (outline.at(x, y)) paint(out.pixel(x, y), kBrainOutline);
            }
        }
    }
    return out;
}

}  // namespace limerefine
