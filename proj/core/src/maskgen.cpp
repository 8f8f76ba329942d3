#include "limerefine/maskgen.hpp"

#include <algorithm>
#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <deque>
#include <numbers>

#include "limerefine/error.hpp"
#include "limerefine/mask_ops.hpp"

namespace limerefine {

std::string_view to_string(DetectorKind kind) noexcept {
    switch (kind) {
        case DetectorKind::Canny: return "canny";
        case DetectorKind::Laplace: return "laplace";
        case DetectorKind::Otsu: return "otsu";
    }
    return "unknown";
}

DetectorKind parse_detector(std::string_view name) {
    if (name == "canny") return DetectorKind::Canny;
    if (name == "laplace") return DetectorKind::Laplace;
    if (name == "otsu") return DetectorKind::Otsu;
    throw Error(ErrorCode::InvalidArgument, "unknown detector \"" + std::string(name) + "\"");
}

std::string_view to_string(Degeneracy d) noexcept {
    switch (d) {
        case Degeneracy::FullImage: return "full-image";
        case Degeneracy::Blank: return "blank";
        case Degeneracy::BlankInterior: return "blank-interior";
    }
    return "unknown";
}

namespace {

// A filled contour whose component is thinner than this on average and
// encloses nothing is treated as an unclosed outline.
constexpr double kThinRingThickness = 2.0;

struct Field {
    int w;
    int h;
    std::vector<double> v;

    double at_clamped(int x, int y) const {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return v[static_cast<std::size_t>(y) * w + x];
    }
    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

Field to_field(const GrayImage& img) {
    Field f{img.width(), img.height(), std::vector<double>(img.size())};
    for (std::size_t i = 0; i < img.size(); ++i) f.v[i] = img[i];
    return f;
}

Field blur_field(const GrayImage& img, double sigma) {
    Field src = to_field(img);
    if (!(sigma > 0.0)) return src;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (auto& k : kernel) k /= sum;

    Field tmp{src.w, src.h, std::vector<double>(src.v.size())};
    for (int y = 0; y < src.h; ++y) {
        for (int x = 0; x < src.w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * src.at_clamped(x + i, y);
            tmp.v[static_cast<std::size_t>(y) * src.w + x] = acc;
        }
    }
    Field out{src.w, src.h, std::vector<double>(src.v.size())};
    for (int y = 0; y < src.h; ++y) {
        for (int x = 0; x < src.w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.at_clamped(x, y + i);
            out.v[static_cast<std::size_t>(y) * src.w + x] = acc;
        }
    }
    return out;
}

void sobel(const Field& f, std::vector<double>& gx, std::vector<double>& gy) {
    gx.assign(f.v.size(), 0.0);
    gy.assign(f.v.size(), 0.0);
    for (int y = 0; y < f.h; ++y) {
        for (int x = 0; x < f.w; ++x) {
            const double a = f.at_clamped(x - 1, y - 1), b = f.at_clamped(x, y - 1),
                         c = f.at_clamped(x + 1, y - 1), d = f.at_clamped(x - 1, y),
                         e = f.at_clamped(x + 1, y), g = f.at_clamped(x - 1, y + 1),
                         h = f.at_clamped(x, y + 1), i = f.at_clamped(x + 1, y + 1);
            const std::size_t p = static_cast<std::size_t>(y) * f.w + x;
            // Divided by 4 so an unblurred unit step has magnitude 1.
            gx[p] = ((c + 2.0 * e + i) - (a + 2.0 * d + g)) / 4.0;
            gy[p] = ((g + 2.0 * h + i) - (a + 2.0 * b + c)) / 4.0;
        }
    }
}

// Direction steps indexed by round(angle / 45deg), y pointing down.
constexpr std::array<std::array<int, 2>, 8> kDirections{
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

std::size_t perimeter_edges(const BinaryMask& m) {
    std::size_t edges = 0;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.at(x, y)) continue;
            if (x == 0 || !m.at(x - 1, y)) ++edges;
            if (x == m.width() - 1 || !m.at(x + 1, y)) ++edges;
            if (y == 0 || !m.at(x, y - 1)) ++edges;
            if (y == m.height() - 1 || !m.at(x, y + 1)) ++edges;
        }
    }
    return edges;
}

}  // namespace

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    Field f = blur_field(img, sigma);
    std::vector<float> data(f.v.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = std::clamp(static_cast<float>(f.v[i]), 0.0f, 1.0f);
    }
    return GrayImage(img.width(), img.height(), std::move(data));
}

std::vector<double> gradient_magnitude(const GrayImage& img) {
    std::vector<double> gx, gy;
    sobel(to_field(img), gx, gy);
    std::vector<double> mag(gx.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::hypot(gx[i], gy[i]);
    return mag;
}

BinaryMask canny_edges(const GrayImage& img, const EdgeDetector& det) {
    if (!(det.canny_low >= 0.0) || !(det.canny_low < det.canny_high)) {
        throw Error(ErrorCode::InvalidArgument, "canny thresholds need 0 <= low < high");
    }
    const Field f = blur_field(img, det.gaussian_sigma);
    const int w = f.w;
    const int h = f.h;
    std::vector<double> gx, gy;
    sobel(f, gx, gy);
    std::vector<double> mag(gx.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::hypot(gx[i], gy[i]);

    auto mag_at = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
        return mag[static_cast<std::size_t>(y) * w + x];
    };

    // Non-maximum suppression along the quantised gradient. On a tie across
    // the edge the pixel on the brighter side survives, so outlines of bright
    // regions sit on the region itself.
    std::vector<std::uint8_t> level(mag.size(), 0);  // 0 none, 1 weak, 2 strong
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            const double m = mag[p];
            if (m <= 0.0 || m < det.canny_low) continue;
            const double angle = std::atan2(gy[p], gx[p]);
            int k = static_cast<int>(std::lround(angle / (std::numbers::pi / 4.0)));
            k = ((k % 8) + 8) % 8;
            const auto& dir = kDirections[static_cast<std::size_t>(k)];
            const double toward_bright = mag_at(x + dir[0], y + dir[1]);
            const double toward_dark = mag_at(x - dir[0], y - dir[1]);
            if (m > toward_bright && m >= toward_dark) level[p] = m >= det.canny_high ? 2 : 1;
        }
    }

    // Hysteresis: weak pixels survive when 8-connected to a strong one.
    BinaryMask edges(w, h);
    std::deque<std::size_t> queue;
    for (std::size_t p = 0; p < level.size(); ++p) {
        if (level[p] == 2) {
            edges.set(p);
            queue.push_back(p);
        }
    }
    while (!queue.empty()) {
        const std::size_t p = queue.front();
        queue.pop_front();
        const int px = static_cast<int>(p % w);
        const int py = static_cast<int>(p / w);
        for (const auto& d : kDirections) {
            const int nx = px + d[0];
            const int ny = py + d[1];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
            if (level[q] == 1 && !edges[q]) {
                edges.set(q);
                queue.push_back(q);
            }
        }
    }
    return edges;
}

std::vector<double> laplace_response(const GrayImage& img, double sigma) {
    const Field f = blur_field(img, sigma);
    std::vector<double> out(f.v.size());
    for (int y = 0; y < f.h; ++y) {
        for (int x = 0; x < f.w; ++x) {
            out[static_cast<std::size_t>(y) * f.w + x] =
                f.at_clamped(x, y - 1) + f.at_clamped(x - 1, y) + f.at_clamped(x + 1, y) +
                f.at_clamped(x, y + 1) - 4.0 * f.at(x, y);
        }
    }
    return out;
}

BinaryMask laplace_edges(const GrayImage& img, const EdgeDetector& det) {
    if (!(det.laplace_threshold >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "laplace_threshold must be >= 0");
    }
    const auto r = laplace_response(img, det.gaussian_sigma);
    const int w = img.width();
    const int h = img.height();
    BinaryMask edges(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double rp = r[static_cast<std::size_t>(y) * w + x];
            if (rp >= 0.0) continue;
            for (int k = 0; k < 8; k += 2) {
                const int nx = x + kDirections[static_cast<std::size_t>(k)][0];
                const int ny = y + kDirections[static_cast<std::size_t>(k)][1];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const double rq = r[static_cast<std::size_t>(ny) * w + nx];
                if (rq > 0.0 && rq - rp > det.laplace_threshold) {
                    edges.set(x, y);
                    break;
                }
            }
        }
    }
    return edges;
}

int intensity_bin(float v) noexcept {
    return static_cast<int>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

int otsu_threshold(const GrayImage& img) {
    using boost::multiprecision::int256_t;

    std::array<std::int64_t, 256> hist{};
    for (float v : img.pixels()) ++hist[static_cast<std::size_t>(intensity_bin(v))];
    if (std::count_if(hist.begin(), hist.end(), [](std::int64_t c) { return c > 0; }) < 2) {
        throw Error(ErrorCode::UniformImage, "image has a single intensity level");
    }

    std::int64_t total_n = 0, total_s = 0;
    for (int b = 0; b < 256; ++b) {
        total_n += hist[b];
        total_s += static_cast<std::int64_t>(b) * hist[b];
    }

    // Between-class variance is proportional to D^2 / (n0 n1) with
    // D = s0 n1 - s1 n0; candidates are compared by exact cross-multiplication.
    int best_t = 0;
    int256_t best_num = -1;
    int256_t best_den = 1;
    std::int64_t n0 = 0, s0 = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += hist[t];
        s0 += static_cast<std::int64_t>(t) * hist[t];
        const std::int64_t n1 = total_n - n0;
        const std::int64_t s1 = total_s - s0;
        int256_t num = 0;
        int256_t den = 1;
        if (n0 > 0 && n1 > 0) {
            const int256_t diff = int256_t(s0) * n1 - int256_t(s1) * n0;
            num = diff * diff;
            den = int256_t(n0) * n1;
        }
        if (num * best_den > best_num * den) {
            best_num = num;
            best_den = den;
            best_t = t;
        }
    }
    return best_t;
}

BinaryMask otsu_mask(const GrayImage& img) {
    const int t = otsu_threshold(img);
    BinaryMask mask(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (intensity_bin(img[i]) > t) mask.set(i);
    }
    return mask;
}

BrainMaskResult brain_mask(const GrayImage& img, const EdgeDetector& det) {
    BrainMaskResult result;
    result.detector = det.kind;
    result.mask = BinaryMask(img.width(), img.height());

    BinaryMask edges;
    try {
        switch (det.kind) {
            case DetectorKind::Canny: edges = canny_edges(img, det); break;
            case DetectorKind::Laplace: edges = laplace_edges(img, det); break;
            case DetectorKind::Otsu: edges = otsu_mask(img); break;
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UniformImage) throw;
        result.degenerate = Degeneracy::Blank;
        return result;
    }

    auto components = connected_components(edges, Connectivity::Eight);
    if (components.empty()) {
        result.degenerate = Degeneracy::Blank;
        return result;
    }
    const BinaryMask& largest = components.front();
    result.mask = fill_holes(largest);

    const double frame = static_cast<double>(img.size());
    const std::size_t area = result.mask.area();
    const std::size_t enclosed = area - largest.area();
    const double thickness =
        2.0 * static_cast<double>(largest.area()) / static_cast<double>(perimeter_edges(largest));

    if (enclosed == 0 && thickness < kThinRingThickness) {
        result.degenerate = Degeneracy::BlankInterior;
    } else if (static_cast<double>(area) < kMinBrainAreaFraction * frame) {
        result.degenerate = Degeneracy::Blank;
    } else if (static_cast<double>(area) > kMaxBrainAreaFraction * frame) {
        result.degenerate = Degeneracy::FullImage;
    }
    return result;
}

}  // namespace limerefine
