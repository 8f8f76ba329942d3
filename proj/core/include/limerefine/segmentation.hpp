#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "limerefine/image.hpp"

namespace limerefine {

/// Per-pixel superpixel labels. Labels are exactly 0..num_segments-1.
class SegmentMap {
public:
    SegmentMap() = default;
    /// Validates that labels cover 0..max contiguously; throws InvalidArgument otherwise.
    SegmentMap(int width, int height, std::vector<int> labels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int num_segments() const noexcept { return num_segments_; }
    int label(int x, int y) const {
        return labels_[static_cast<std::size_t>(y) * width_ + x];
    }
    int operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const noexcept { return labels_; }

    friend bool operator==(const SegmentMap&, const SegmentMap&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int num_segments_ = 0;
    std::vector<int> labels_;
};

struct QuickShiftParams {
    double kernel_size = 4.0;  // Gaussian bandwidth of the density estimate, pixels
    double max_dist = 200.0;   // links longer than this (joint space) are cut
    double ratio = 0.2;        // weight of intensity against position
    std::uint64_t seed = 0;    // density jitter for reproducible tie-breaking
};

/// Intensities are put on a 0..100 lightness scale before `ratio` is applied,
/// which makes `ratio` and `max_dist` comparable to Lab-based quick-shift.
inline constexpr double kQuickShiftIntensityScale = 100.0;

SegmentMap quickshift_segment(const GrayImage& img, const QuickShiftParams& params = {});

/// Count of pixels per segment, indexed by segment ID.
std::vector<std::size_t> segment_pixel_counts(const SegmentMap& seg);

}  // namespace limerefine
