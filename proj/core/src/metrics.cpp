#include "limerefine/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "limerefine/error.hpp"

namespace limerefine {

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

double overlap_fraction(const BinaryMask& expl, const BinaryMask& ref, ErrorCode empty_code,
                        const char* what) {
    if (!expl.same_shape(ref)) throw Error(ErrorCode::ShapeMismatch, what);
    std::size_t ref_area = 0, both = 0;
    const auto e = expl.bits();
    const auto r = ref.bits();
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i]) {
            ++ref_area;
            if (e[i]) ++both;
        }
    }
    if (ref_area == 0) throw Error(empty_code, what);
    return static_cast<double>(both) / static_cast<double>(ref_area);
}

// Midranks doubled so tied ranks stay integral.
std::vector<std::int64_t> doubled_midranks(const std::vector<double>& pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<std::int64_t> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        // Ranks i+1 .. j+1 share the midrank (i + j + 2) / 2.
        const auto doubled = static_cast<std::int64_t>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
        i = j + 1;
    }
    return ranks;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

ClassificationMetrics classification_metrics(const ConfusionCounts& c) {
    ClassificationMetrics m;
    m.accuracy = ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn);
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
        m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    }
    return m;
}

double tumor_segment_coverage(const BinaryMask& expl, const BinaryMask& tumor) {
    return overlap_fraction(expl, tumor, ErrorCode::EmptyAnnotation, "tumor annotation coverage");
}

double brain_mask_segment_coverage(const BinaryMask& expl, const BinaryMask& brain) {
    return overlap_fraction(expl, brain, ErrorCode::EmptyMask, "brain mask coverage");
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 MannWhitneyMethod method) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "Mann-Whitney needs two nonempty samples");
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    const std::size_t n = na + nb;

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    for (double v : pooled) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite sample value");
    }
    const auto ranks = doubled_midranks(pooled);

    std::int64_t rank_sum_a2 = 0;
    for (std::size_t i = 0; i < na; ++i) rank_sum_a2 += ranks[i];
    // 2U = 2R_a - na (na + 1)
    const std::int64_t u2 = rank_sum_a2 - static_cast<std::int64_t>(na * (na + 1));

    MannWhitneyResult res;
    res.u = static_cast<double>(u2) / 2.0;

    const bool exact = method == MannWhitneyMethod::Exact ||
                       (method == MannWhitneyMethod::Auto && n <= kMannWhitneyExactLimit);
    if (exact) {
        // Count, over every way of drawing na of the pooled ranks, how many
        // give each doubled rank sum: ways[k][s] after scanning all items.
        std::int64_t max_sum = 0;
        for (auto r : ranks) max_sum += r;
        std::vector<std::vector<std::uint64_t>> ways(
            na + 1, std::vector<std::uint64_t>(static_cast<std::size_t>(max_sum) + 1, 0));
        ways[0][0] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<std::size_t>(ranks[i]);
            for (std::size_t k = std::min(i + 1, na); k >= 1; --k) {
                for (std::size_t s = static_cast<std::size_t>(max_sum); s >= r; --s) {
                    ways[k][s] += ways[k - 1][s - r];
                    if (s == r) break;
                }
            }
        }
        std::uint64_t total = 0, le = 0, ge = 0;
        for (std::size_t s = 0; s < ways[na].size(); ++s) {
            const std::uint64_t c = ways[na][s];
            total += c;
            const auto si = static_cast<std::int64_t>(s);
            if (si <= rank_sum_a2) le += c;
            if (si >= rank_sum_a2) ge += c;
        }
        const double tail = static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
        res.p_two_sided = std::min(1.0, 2.0 * tail);
        res.exact = true;
        return res;
    }

    const double mean = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
    // Tie correction: sum of (t^3 - t) over groups of tied values.
    double tie_term = 0.0;
    {
        std::vector<double> sorted = pooled;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double nn = static_cast<double>(n);
    const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                       ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) {
        res.p_two_sided = 1.0;
        return res;
    }
    const double dev = std::max(0.0, std::abs(res.u - mean) - 0.5);
    res.p_two_sided = std::min(1.0, 2.0 * normal_sf(dev / std::sqrt(var)));
    return res;
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> labels, int k,
                                                       std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
        by_class[labels[i]].push_back(i);
    }
    for (const auto& members : by_class) {
        if (members.size() < static_cast<std::size_t>(k)) {
            throw Error(ErrorCode::InsufficientClassMembers,
                        "each class needs at least " + std::to_string(k) + " members");
        }
    }

    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    std::size_t next = 0;  // round-robin cursor carries over between classes
    for (auto& members : by_class) {
        // Fisher-Yates with an explicit draw so the order does not depend on
        // the standard library's distribution implementation.
        for (std::size_t i = members.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(members[i - 1], members[j]);
        }
        for (std::size_t idx : members) {
            folds[next].push_back(idx);
            next = (next + 1) % folds.size();
        }
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

}  // namespace limerefine
