#include "limerefine/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "limerefine/error.hpp"
#include "limerefine/mask_ops.hpp"

namespace limerefine {

namespace {

constexpr float kBackground = 0.03f;
constexpr double kBrainLevel = 0.45;
constexpr double kTextureAmplitude = 0.03;
constexpr float kTumorLevel = 0.95f;
constexpr float kLabelLevel = 0.9f;
constexpr double kNoiseSigma = 0.01;
constexpr int kOutlineVertices = 32;

class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : rng_(seed) {}
    double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace

Phantom make_phantom(int size, std::uint64_t seed) {
    if (size < 32) throw Error(ErrorCode::InvalidArgument, "phantom size must be >= 32");
    Uniform u(seed);
    const double s = size;

    const double cx = s * u(0.46, 0.54);
    const double cy = s * u(0.46, 0.54);
    const double ax = s * u(0.30, 0.36);
    const double ay = s * u(0.36, 0.41);

    struct Wave {
        double fx, fy, phase;
    };
    Wave waves[3];
    for (auto& wv : waves) {
        wv.fx = u(-3.0, 3.0) * 2.0 * std::numbers::pi / s;
        wv.fy = u(-3.0, 3.0) * 2.0 * std::numbers::pi / s;
        wv.phase = u(0.0, 2.0 * std::numbers::pi);
    }

    // Tumor: a slightly irregular polygon well inside the ellipse.
    const double tr = s * u(0.045, 0.07);
    const double place_r = u(0.0, 0.55);
    const double place_a = u(0.0, 2.0 * std::numbers::pi);
    const double tx = cx + place_r * ax * std::cos(place_a);
    const double ty = cy + place_r * ay * std::sin(place_a);
    Polygon outline;
    for (int k = 0; k < kOutlineVertices; ++k) {
        const double a = 2.0 * std::numbers::pi * k / kOutlineVertices;
        const double r = tr * u(0.9, 1.1);
        outline.vertices.push_back({tx + r * std::cos(a), ty + r * std::sin(a)});
    }

    // Scanner label: a bright block in one corner, clear of the ellipse.
    const int corner = static_cast<int>(u() * 4.0) % 4;
    const int lw = static_cast<int>(s * u(0.08, 0.18));
    const int lh = static_cast<int>(s * u(0.04, 0.07));
    const int margin = static_cast<int>(s * 0.04);
    const int lx = (corner & 1) ? size - margin - lw : margin;
    const int ly = (corner & 2) ? size - margin - lh : margin;

    Phantom ph;
    ph.tumor = rasterize_polygon(outline, size, size);
    ph.tumor_outline = std::move(outline);
    ph.brain = BinaryMask(size, size);

    std::normal_distribution<double> noise(0.0, kNoiseSigma);
    std::vector<float> data(static_cast<std::size_t>(size) * size, kBackground);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            const double ex = (px - cx) / ax, ey = (py - cy) / ay;
            double v = kBackground;
            if (ex * ex + ey * ey <= 1.0) {
                ph.brain.set(x, y);
                v = kBrainLevel;
                for (const auto& wv : waves) v += kTextureAmplitude * std::sin(wv.fx * px + wv.fy * py + wv.phase);
            }
            if (ph.tumor.at(x, y)) {
                ph.brain.set(x, y);
                v = kTumorLevel;
            }
            if (x >= lx && x < lx + lw && y >= ly && y < ly + lh) v = kLabelLevel;
            v += noise(u.engine());
            data[static_cast<std::size_t>(y) * size + x] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    ph.image = GrayImage(size, size, std::move(data));
    return ph;
}

}  // namespace limerefine
