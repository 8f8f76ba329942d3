#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "limerefine/maskgen_types.hpp"

namespace limerefine {

/// Segment ID -> signed importance, plus the surrogate intercept.
struct Heatmap {
    std::vector<double> importances;  // indexed by segment ID
    double intercept = 0.0;
    std::uint64_t seed = 0;

    int num_segments() const noexcept { return static_cast<int>(importances.size()); }
    friend bool operator==(const Heatmap&, const Heatmap&) = default;
};

/// Heatmap after the brain-mask retention rule.
struct RefinedHeatmap {
    Heatmap heatmap;
    DetectorKind detector = DetectorKind::Canny;
    std::vector<std::string> warnings;
};

/// {"intercept", "importances": {"0": w0, ...}, "num_segments", "seed"}
std::string heatmap_to_json(const Heatmap& hm);
/// Same schema plus "refined": true, "detector" and "warnings".
std::string heatmap_to_json(const RefinedHeatmap& rh);
Heatmap heatmap_from_json(const std::string& text);

}  // namespace limerefine
