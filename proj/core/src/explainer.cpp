#include "limerefine/explainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "limerefine/error.hpp"

namespace limerefine {

namespace {

// Realised images are produced and scored in groups of this size so memory
// stays bounded regardless of num_samples.
constexpr std::size_t kRealizeChunk = 64;

// Solves the symmetric positive (semi)definite system a * x = b in place by
// Cholesky factorisation. Returns false when a pivot is not positive
// relative to the largest diagonal entry.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n, double rel_tol) {
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a[i * n + i]));
    const double tol = rel_tol * std::max(1.0, max_diag);

    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
        if (!(diag > tol)) return false;
        const double ljj = std::sqrt(diag);
        a[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / ljj;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
        b[i] = s / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
        b[i] = s / a[i * n + i];
    }
    return true;
}

}  // namespace

std::vector<Presence> sample_presence_vectors(int num_segments, const ExplainerParams& params) {
    if (num_segments < 1) throw Error(ErrorCode::InvalidArgument, "need at least one segment");
    if (params.num_samples < 1) throw Error(ErrorCode::InvalidArgument, "num_samples must be >= 1");
    const auto d = static_cast<std::size_t>(num_segments);

    std::vector<Presence> out;
    if (d < 63 && (std::uint64_t{1} << d) <= params.num_samples) {
        const std::uint64_t total = std::uint64_t{1} << d;
        out.reserve(total);
        // Descending from the all-ones subset; bit j is segment j.
        for (std::uint64_t m = total; m-- > 0;) {
            Presence z(d);
            for (std::size_t j = 0; j < d; ++j) z[j] = static_cast<std::uint8_t>((m >> j) & 1U);
            out.push_back(std::move(z));
        }
        return out;
    }

    out.reserve(params.num_samples);
    out.emplace_back(d, std::uint8_t{1});
    std::mt19937_64 rng(params.seed);
    for (std::size_t k = 1; k < params.num_samples; ++k) {
        Presence z(d);
        std::uint64_t word = 0;
        for (std::size_t j = 0; j < d; ++j) {
            if (j % 64 == 0) word = rng();
            z[j] = static_cast<std::uint8_t>((word >> (j % 64)) & 1U);
        }
        out.push_back(std::move(z));
    }
    return out;
}

GrayImage realize_image(const GrayImage& img, const SegmentMap& seg, const Presence& presence,
                        FillMode fill) {
    if (!img.same_shape(seg.width(), seg.height())) {
        throw Error(ErrorCode::ShapeMismatch, "image and segment map differ in size");
    }
    if (presence.size() != static_cast<std::size_t>(seg.num_segments())) {
        throw Error(ErrorCode::ShapeMismatch, "presence vector length differs from segment count");
    }
    std::vector<float> replacement(presence.size(), fill.value);
    if (fill.kind == FillMode::Kind::SegmentMean) {
        std::vector<double> sum(presence.size(), 0.0);
        std::vector<std::size_t> count(presence.size(), 0);
        for (std::size_t i = 0; i < img.size(); ++i) {
            sum[seg[i]] += img[i];
            ++count[seg[i]];
        }
        for (std::size_t s = 0; s < presence.size(); ++s) {
            replacement[s] = std::clamp(static_cast<float>(sum[s] / count[s]), 0.0f, 1.0f);
        }
    } else if (!(fill.value >= 0.0f && fill.value <= 1.0f)) {
        throw Error(ErrorCode::InvalidArgument, "constant fill outside [0,1]");
    }

    GrayImage out = img;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int s = seg[i];
        if (!presence[s]) out[i] = replacement[s];
    }
    return out;
}

double kernel_weight(const Presence& presence, double kernel_width) {
    if (presence.empty()) throw Error(ErrorCode::InvalidArgument, "empty presence vector");
    if (!(kernel_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel_width must be > 0");
    const auto d = static_cast<double>(presence.size());
    const auto on = static_cast<double>(std::count(presence.begin(), presence.end(), std::uint8_t{1}));
    const double dist = on == 0.0 ? 1.0 : 1.0 - on / std::sqrt(on * d);
    return std::exp(-dist * dist / (kernel_width * kernel_width));
}

Heatmap fit_surrogate(const std::vector<PerturbationSample>& samples, int target_class,
                      double ridge_lambda) {
    if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no perturbation samples");
    if (ridge_lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "ridge_lambda must be >= 0");
    if (target_class != 0 && target_class != 1) {
        throw Error(ErrorCode::InvalidArgument, "target class must be 0 or 1");
    }
    const std::size_t d = samples.front().presence.size();
    for (const auto& s : samples) {
        if (s.presence.size() != d) throw Error(ErrorCode::ShapeMismatch, "ragged presence vectors");
        if (!(s.kernel_weight > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel weight must be > 0");
    }

    // Centre on the weighted means so the intercept drops out of the system.
    double total_w = 0.0, mean_y = 0.0;
    std::vector<double> mean_z(d, 0.0);
    for (const auto& s : samples) {
        const double w = s.kernel_weight;
        total_w += w;
        mean_y += w * s.prediction.prob(target_class);
        for (std::size_t j = 0; j < d; ++j) mean_z[j] += w * s.presence[j];
    }
    mean_y /= total_w;
    for (auto& m : mean_z) m /= total_w;

    std::vector<double> gram(d * d, 0.0);
    std::vector<double> rhs(d, 0.0);
    std::vector<double> zc(d);
    for (const auto& s : samples) {
        const double w = s.kernel_weight;
        const double yc = s.prediction.prob(target_class) - mean_y;
        for (std::size_t j = 0; j < d; ++j) zc[j] = s.presence[j] - mean_z[j];
        for (std::size_t i = 0; i < d; ++i) {
            const double wi = w * zc[i];
            rhs[i] += wi * yc;
            for (std::size_t j = 0; j <= i; ++j) gram[i * d + j] += wi * zc[j];
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        gram[i * d + i] += ridge_lambda;
        for (std::size_t j = 0; j < i; ++j) gram[j * d + i] = gram[i * d + j];
    }

    if (!cholesky_solve(gram, rhs, d, ridge_lambda > 0.0 ? 0.0 : 1e-10)) {
        throw Error(ErrorCode::SingularSystem, "weighted Gram matrix is rank-deficient");
    }

    Heatmap hm;
    hm.importances = std::move(rhs);
    hm.intercept = mean_y;
    for (std::size_t j = 0; j < d; ++j) hm.intercept -= hm.importances[j] * mean_z[j];
    return hm;
}

Heatmap explain(const GrayImage& img, const SegmentMap& seg, Predictor& predictor,
                const ExplainerParams& params) {
    const auto presences = sample_presence_vectors(seg.num_segments(), params);

    std::vector<PerturbationSample> samples;
    samples.reserve(presences.size());
    std::vector<GrayImage> chunk;
    for (std::size_t start = 0; start < presences.size(); start += kRealizeChunk) {
        const std::size_t end = std::min(presences.size(), start + kRealizeChunk);
        chunk.clear();
        for (std::size_t k = start; k < end; ++k) {
            chunk.push_back(realize_image(img, seg, presences[k], params.fill));
        }
        const auto preds = predictor.predict_batch(chunk);
        for (std::size_t k = start; k < end; ++k) {
            samples.push_back({presences[k], preds[k - start],
                               kernel_weight(presences[k], params.kernel_width)});
        }
    }

    Heatmap hm = fit_surrogate(samples, 1, params.ridge_lambda);
    hm.seed = params.seed;
    return hm;
}

std::vector<int> top_segments(const Heatmap& hm, std::size_t n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    std::vector<int> ids;
    for (int s = 0; s < hm.num_segments(); ++s) {
        if (hm.importances[static_cast<std::size_t>(s)] > 0.0) ids.push_back(s);
    }
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        return hm.importances[static_cast<std::size_t>(a)] > hm.importances[static_cast<std::size_t>(b)];
    });
    if (ids.size() > n) ids.resize(n);
    return ids;
}

}  // namespace limerefine
