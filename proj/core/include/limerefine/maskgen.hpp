#pragma once

#include <optional>

#include "limerefine/image.hpp"
#include "limerefine/maskgen_types.hpp"

namespace limerefine {

struct EdgeDetector {
    DetectorKind kind = DetectorKind::Canny;
    double gaussian_sigma = 1.4;
    double canny_low = 0.1;   // on gradient magnitudes where a unit step scores 1
    double canny_high = 0.2;
    double laplace_threshold = 0.02;

    static EdgeDetector with_kind(DetectorKind k) {
        EdgeDetector d;
        d.kind = k;
        return d;
    }
};

struct BrainMaskResult {
    BinaryMask mask;
    DetectorKind detector = DetectorKind::Canny;
    std::optional<Degeneracy> degenerate;
};

inline constexpr double kMinBrainAreaFraction = 0.05;
inline constexpr double kMaxBrainAreaFraction = 0.95;

/// Separable Gaussian, radius ceil(3 sigma), clamped borders. sigma <= 0 is identity.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Sobel gradient magnitude scaled so that an unblurred unit step scores 1.
std::vector<double> gradient_magnitude(const GrayImage& img);

BinaryMask canny_edges(const GrayImage& img, const EdgeDetector& det);

/// 3x3 Laplacian (0,1,0;1,-4,1;0,1,0) of the blurred image, clamped borders.
std::vector<double> laplace_response(const GrayImage& img, double sigma);

/// Zero crossings of the Laplacian response: a pixel with negative response
/// (bright side) whose 4-neighbour is positive, with contrast above the threshold.
BinaryMask laplace_edges(const GrayImage& img, const EdgeDetector& det);

/// Threshold t in 0..255 maximising between-class variance over the 256-bin
/// histogram (smallest on ties). Throws UniformImage for single-valued input.
int otsu_threshold(const GrayImage& img);
/// Histogram bin of an intensity: round(v * 255).
int intensity_bin(float v) noexcept;
/// Pixels whose bin exceeds the Otsu threshold.
BinaryMask otsu_mask(const GrayImage& img);

/// Edge map -> largest 8-connected component -> hole filling, with
/// degeneracy flags instead of exceptions.
BrainMaskResult brain_mask(const GrayImage& img, const EdgeDetector& det);

}  // namespace limerefine
