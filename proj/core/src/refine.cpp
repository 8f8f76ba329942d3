#include "limerefine/refine.hpp"

#include <string>

#include "limerefine/error.hpp"
#include "limerefine/explainer.hpp"

namespace limerefine {

RefinedHeatmap refine_heatmap(const Heatmap& hm, const SegmentMap& seg, const BrainMaskResult& bm,
                              const RefineParams& params) {
    if (!(params.inside_fraction > 0.0 && params.inside_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "inside_fraction must be in (0, 1]");
    }
    if (bm.mask.width() != seg.width() || bm.mask.height() != seg.height()) {
        throw Error(ErrorCode::ShapeMismatch, "brain mask and segment map differ in size");
    }
    if (hm.num_segments() != seg.num_segments()) {
        throw Error(ErrorCode::ShapeMismatch, "heatmap and segment map disagree on segment count");
    }

    RefinedHeatmap out{hm, bm.detector, {}};
    if (bm.degenerate && params.fallback_on_degenerate) {
        out.warnings.push_back("degenerate " + std::string(to_string(*bm.degenerate)) + " " +
                               std::string(to_string(bm.detector)) +
                               " brain mask; heatmap left unrefined");
        return out;
    }

    const auto d = static_cast<std::size_t>(seg.num_segments());
    std::vector<std::size_t> total(d, 0), inside(d, 0);
    const auto& labels = seg.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto s = static_cast<std::size_t>(labels[i]);
        ++total[s];
        if (bm.mask[i]) ++inside[s];
    }
    for (std::size_t s = 0; s < d; ++s) {
        const double frac = static_cast<double>(inside[s]) / static_cast<double>(total[s]);
        if (!(frac >= params.inside_fraction)) out.heatmap.importances[s] = 0.0;
    }
    return out;
}

BinaryMask explanation_pixels(const Heatmap& hm, const SegmentMap& seg, std::size_t n) {
    if (hm.num_segments() != seg.num_segments()) {
        throw Error(ErrorCode::ShapeMismatch, "heatmap and segment map disagree on segment count");
    }
    std::vector<std::uint8_t> chosen(static_cast<std::size_t>(seg.num_segments()), 0);
    for (int s : top_segments(hm, n)) chosen[static_cast<std::size_t>(s)] = 1;
    BinaryMask mask(seg.width(), seg.height());
    const auto& labels = seg.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (chosen[static_cast<std::size_t>(labels[i])]) mask.set(i);
    }
    return mask;
}

}  // namespace limerefine
