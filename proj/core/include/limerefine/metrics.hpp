#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "limerefine/image.hpp"
#include "limerefine/maskgen_types.hpp"

namespace limerefine {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
};

/// A metric with a zero denominator is std::nullopt, never 0.
struct ClassificationMetrics {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

ClassificationMetrics classification_metrics(const ConfusionCounts& c);

struct CoverageReport {
    std::optional<double> tumor_coverage;
    std::optional<double> brain_coverage;
    std::size_t n_segments_used = 0;
    DetectorKind detector = DetectorKind::Canny;
    bool refined = false;
};

/// |expl & tumor| / |tumor|. Throws EmptyAnnotation or ShapeMismatch.
double tumor_segment_coverage(const BinaryMask& expl, const BinaryMask& tumor);
/// |expl & brain| / |brain|. Throws EmptyMask or ShapeMismatch.
double brain_mask_segment_coverage(const BinaryMask& expl, const BinaryMask& brain);

struct MannWhitneyResult {
    double u = 0.0;  // pairs with a > b, ties counted one half
    double p_two_sided = 1.0;
    bool exact = false;
};

enum class MannWhitneyMethod { Auto, Exact, Normal };

inline constexpr std::size_t kMannWhitneyExactLimit = 12;

/// Auto uses full enumeration of rank assignments when |a| + |b| <= 12 and a
/// tie- and continuity-corrected normal approximation otherwise.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 MannWhitneyMethod method = MannWhitneyMethod::Auto);

/// Per-class shuffle followed by round-robin assignment. Returns k sorted
/// index lists that partition 0..labels.size()-1.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> labels, int k,
                                                       std::uint64_t seed);

}  // namespace limerefine
