#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "limerefine/error.hpp"
#include "limerefine/image.hpp"
#include "limerefine/segmentation.hpp"

#define EXPECT_THROW_CODE(expected, ...)                                         \
    do {                                                                         \
        try {                                                                    \
            (void)(__VA_ARGS__);                                                 \
            ADD_FAILURE() << "expected " << ::limerefine::to_string(expected);   \
        } catch (const ::limerefine::Error& e_) {                                \
            EXPECT_EQ(e_.code(), expected) << e_.what();                         \
        }                                                                        \
    } while (0)

namespace lrtest {

using namespace limerefine;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    bool coin(double p = 0.5) { return uniform() < p; }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

inline GrayImage random_image(int w, int h, Rng& rng) {
    GrayImage img(w, h);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<float>(rng.uniform());
    return img;
}

inline BinaryMask random_mask(int w, int h, double p, Rng& rng) {
    BinaryMask m(w, h);
    for (std::size_t i = 0; i < m.size(); ++i) m.set(i, rng.coin(p));
    return m;
}

/// Blocky random segmentation with `d` labels; every label is used.
inline SegmentMap random_segments(int w, int h, int d, Rng& rng) {
    std::vector<int> labels(static_cast<std::size_t>(w) * h);
    for (auto& l : labels) l = rng.integer(0, d - 1);
    for (int k = 0; k < d && k < static_cast<int>(labels.size()); ++k) labels[k] = k;
    return SegmentMap(w, h, std::move(labels));
}

/// Bright disk (value 1 inside, 0 outside) by pixel-centre test.
inline GrayImage disk_image(int size, double r, float inside = 1.0f, float outside = 0.0f) {
    GrayImage img(size, size, outside);
    const double c = size / 2.0;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double dx = x + 0.5 - c, dy = y + 0.5 - c;
            if (dx * dx + dy * dy <= r * r) img.at(x, y) = inside;
        }
    return img;
}

inline BinaryMask disk_mask(int size, double r) {
    BinaryMask m(size, size);
    const double c = size / 2.0;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double dx = x + 0.5 - c, dy = y + 0.5 - c;
            if (dx * dx + dy * dy <= r * r) m.set(x, y);
        }
    return m;
}

inline double iou(const BinaryMask& a, const BinaryMask& b) {
    const auto u = (a | b).area();
    return u == 0 ? 1.0 : static_cast<double>((a & b).area()) / static_cast<double>(u);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("limerefine-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace lrtest
