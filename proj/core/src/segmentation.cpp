#include "limerefine/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "limerefine/error.hpp"

namespace limerefine {

SegmentMap::SegmentMap(int width, int height, std::vector<int> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
    if (width <= 0 || height <= 0) throw Error(ErrorCode::ZeroDimension, "empty segment map");
    if (labels_.size() != static_cast<std::size_t>(width) * height) {
        throw Error(ErrorCode::InvalidArgument, "label buffer does not match dimensions");
    }
    int max_label = -1;
    for (int l : labels_) {
        if (l < 0) throw Error(ErrorCode::InvalidArgument, "negative segment label");
        max_label = std::max(max_label, l);
    }
    std::vector<char> seen(static_cast<std::size_t>(max_label) + 1, 0);
    for (int l : labels_) seen[l] = 1;
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw Error(ErrorCode::InvalidArgument, "segment labels are not contiguous");
    }
    num_segments_ = max_label + 1;
}

SegmentMap quickshift_segment(const GrayImage& img, const QuickShiftParams& params) {
    if (!(params.kernel_size >= 1.0) || !(params.max_dist > 0.0) || !(params.ratio >= 0.0) ||
        !(params.ratio <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "quick-shift parameters out of range");
    }
    const int w = img.width();
    const int h = img.height();
    const std::size_t n = img.size();
    const int radius = static_cast<int>(std::ceil(3.0 * params.kernel_size));
    const double inv_two_sigma2 = 1.0 / (2.0 * params.kernel_size * params.kernel_size);
    const double colour_scale = params.ratio * kQuickShiftIntensityScale;

    std::vector<double> feature(n);
    for (std::size_t i = 0; i < n; ++i) feature[i] = colour_scale * img[i];

    // Spatial part of the Gaussian is separable from the intensity part.
    std::vector<double> spatial(static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1));
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            spatial[static_cast<std::size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)] =
                std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
        }
    }

    std::vector<double> density(n, 0.0);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - radius), y1 = std::min(h - 1, y + radius);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - radius), x1 = std::min(w - 1, x + radius);
            const double fp = feature[static_cast<std::size_t>(y) * w + x];
            double sum = 0.0;
            for (int qy = y0; qy <= y1; ++qy) {
                const double* srow =
                    &spatial[static_cast<std::size_t>(qy - y + radius) * (2 * radius + 1)];
                for (int qx = x0; qx <= x1; ++qx) {
                    const double dc = fp - feature[static_cast<std::size_t>(qy) * w + qx];
                    sum += srow[qx - x + radius] * std::exp(-dc * dc * inv_two_sigma2);
                }
            }
            density[static_cast<std::size_t>(y) * w + x] = sum;
        }
    }

    std::mt19937_64 rng(params.seed);
    for (auto& d : density) {
        d += static_cast<double>(rng() >> 11) * 0x1.0p-53 * 1e-6;
    }

    // Link each pixel to the nearest (joint space) higher-density pixel in
    // the window; links longer than max_dist become roots.
    const double max_dist2 = params.max_dist * params.max_dist;
    std::vector<std::size_t> parent(n);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - radius), y1 = std::min(h - 1, y + radius);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - radius), x1 = std::min(w - 1, x + radius);
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            const double dp = density[p];
            const double fp = feature[p];
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_q = p;
            for (int qy = y0; qy <= y1; ++qy) {
                for (int qx = x0; qx <= x1; ++qx) {
                    const std::size_t q = static_cast<std::size_t>(qy) * w + qx;
                    if (density[q] <= dp) continue;
                    const double dc = fp - feature[q];
                    const double d2 = dc * dc + (qx - x) * (qx - x) + (qy - y) * (qy - y);
                    if (d2 < best) {
                        best = d2;
                        best_q = q;
                    }
                }
            }
            parent[p] = best <= max_dist2 ? best_q : p;
        }
    }

    // Densities strictly increase along links, so every chain ends at a root.
    std::vector<std::size_t> root(n);
    for (std::size_t p = 0; p < n; ++p) {
        std::size_t r = p;
        while (parent[r] != r) r = parent[r];
        root[p] = r;
        for (std::size_t q = p; parent[q] != q;) {
            const std::size_t next = parent[q];
            parent[q] = r;
            q = next;
        }
    }

    // A tree can hop over pixels owned by another tree; split such trees
    // into their 8-connected pieces, numbered in first-pixel order.
    std::vector<int> labels(n, -1);
    std::vector<std::size_t> stack;
    int next_label = 0;
    for (std::size_t p = 0; p < n; ++p) {
        if (labels[p] >= 0) continue;
        const std::size_t r = root[p];
        const int l = next_label++;
        labels[p] = l;
        stack.push_back(p);
        while (!stack.empty()) {
            const std::size_t q = stack.back();
            stack.pop_back();
            const int qx = static_cast<int>(q % w), qy = static_cast<int>(q / w);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = qx + dx, ny = qy + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const std::size_t m = static_cast<std::size_t>(ny) * w + nx;
                    if (labels[m] >= 0 || root[m] != r) continue;
                    labels[m] = l;
                    stack.push_back(m);
                }
            }
        }
    }
    return SegmentMap(w, h, std::move(labels));
}

std::vector<std::size_t> segment_pixel_counts(const SegmentMap& seg) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(seg.num_segments()), 0);
    for (int l : seg.labels()) ++counts[static_cast<std::size_t>(l)];
    return counts;
}

}  // namespace limerefine
