#pragma once

#include <cstddef>
#include <optional>

#include "limerefine/heatmap.hpp"
#include "limerefine/image.hpp"
#include "limerefine/maskgen.hpp"
#include "limerefine/segmentation.hpp"

namespace limerefine {

/// Grayscale base with the top-n segments tinted (green for positive
/// importance, red for negative; opacity grows with |importance|), their
/// boundaries drawn in yellow and the brain-mask outline in blue when given.
RgbImage render_overlay(const GrayImage& img, const Heatmap& hm, const SegmentMap& seg,
                        std::size_t n, const BrainMaskResult* bm = nullptr);

RgbImage gray_to_rgb(const GrayImage& img);

}  // namespace limerefine
