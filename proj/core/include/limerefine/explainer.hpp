#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "limerefine/heatmap.hpp"
#include "limerefine/image.hpp"
#include "limerefine/predictor.hpp"
#include "limerefine/segmentation.hpp"

namespace limerefine {

/// One presence bit per segment (1 = segment kept).
using Presence = std::vector<std::uint8_t>;

struct FillMode {
    enum class Kind { SegmentMean, Constant } kind = Kind::SegmentMean;
    float value = 0.0f;  // used by Constant

    static FillMode segment_mean() { return {}; }
    static FillMode constant(float c) { return {Kind::Constant, c}; }
};

struct ExplainerParams {
    std::size_t num_samples = 1000;
    double kernel_width = 0.25;
    double ridge_lambda = 1.0;
    FillMode fill = FillMode::constant(0.0f);  // hidden segments go black
    std::uint64_t seed = 0;
};

struct PerturbationSample {
    Presence presence;
    Prediction prediction;
    double kernel_weight = 1.0;
};

/// Exactly num_samples vectors, the first all ones. When 2^d <= num_samples
/// every subset is enumerated once instead (all ones first).
std::vector<Presence> sample_presence_vectors(int num_segments, const ExplainerParams& params);

/// Absent segments are replaced by their mean intensity or a constant.
GrayImage realize_image(const GrayImage& img, const SegmentMap& seg, const Presence& presence,
                        FillMode fill);

/// exp(-dist^2 / width^2) with dist the cosine distance to the all-ones vector.
double kernel_weight(const Presence& presence, double kernel_width = 0.25);

/// Weighted ridge regression of the target-class probability on presence
/// vectors; the intercept is not penalised.
Heatmap fit_surrogate(const std::vector<PerturbationSample>& samples, int target_class,
                      double ridge_lambda);

/// sample -> realize -> predict -> weight -> fit, explaining the tumor class.
Heatmap explain(const GrayImage& img, const SegmentMap& seg, Predictor& predictor,
                const ExplainerParams& params = {});

/// Positive-importance segments, highest first (ties by lower ID), at most n.
std::vector<int> top_segments(const Heatmap& hm, std::size_t n);

}  // namespace limerefine
