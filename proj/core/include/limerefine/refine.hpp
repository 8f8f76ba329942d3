#pragma once

#include <cstddef>

#include "limerefine/heatmap.hpp"
#include "limerefine/maskgen.hpp"
#include "limerefine/segmentation.hpp"

namespace limerefine {

struct RefineParams {
    double inside_fraction = 0.8;
    bool fallback_on_degenerate = true;
};

/// Keeps a segment's importance iff at least inside_fraction of its pixels lie
/// in the brain mask; zeroes it otherwise. Degenerate masks pass the heatmap
/// through unchanged (with a warning) when fallback_on_degenerate is set.
RefinedHeatmap refine_heatmap(const Heatmap& hm, const SegmentMap& seg,
                              const BrainMaskResult& bm, const RefineParams& params = {});

/// Union of the pixels of top_segments(hm, n).
BinaryMask explanation_pixels(const Heatmap& hm, const SegmentMap& seg, std::size_t n);

}  // namespace limerefine
