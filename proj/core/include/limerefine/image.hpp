#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace limerefine {

/// Row-major grayscale raster with intensities in [0, 1].
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, float fill = 0.0f);
    /// Takes ownership of `data`; throws ZeroDimension / InvalidArgument when
    /// the size does not match or a value falls outside [0, 1].
    GrayImage(int width, int height, std::vector<float> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    float at(int x, int y) const { return data_[index(x, y)]; }
    float& at(int x, int y) { return data_[index(x, y)]; }
    float operator[](std::size_t i) const { return data_[i]; }
    float& operator[](std::size_t i) { return data_[i]; }

    std::span<const float> pixels() const noexcept { return data_; }
    std::span<float> pixels() noexcept { return data_; }

    bool same_shape(int w, int h) const noexcept { return width_ == w && height_ == h; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/// Row-major boolean raster. Used for the brain mask, tumor annotations and
/// explanation footprints.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool v = true) { bits_[i] = v ? 1 : 0; }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::size_t area() const noexcept;
    bool same_shape(const BinaryMask& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    BinaryMask operator&(const BinaryMask& other) const;
    BinaryMask operator|(const BinaryMask& other) const;
    BinaryMask operator~() const;
    /// True when every set bit of *this is also set in `other`.
    bool subset_of(const BinaryMask& other) const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct Point2d {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2d&, const Point2d&) = default;
};

struct Polygon {
    std::vector<Point2d> vertices;
};

/// Interleaved 8-bit RGB raster, used for overlay rendering.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t* pixel(int x, int y) {
        return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    const std::uint8_t* pixel(int x, int y) const {
        return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Bilinear resample to side x side (pixel-center aligned, edges clamped).
GrayImage resize_normalize(const GrayImage& img, int side = 224);

}  // namespace limerefine
