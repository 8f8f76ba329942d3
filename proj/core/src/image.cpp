#include "limerefine/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "limerefine/error.hpp"

namespace limerefine {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnreadableImage: return "UnreadableImage";
        case ErrorCode::ZeroDimension: return "ZeroDimension";
        case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::PredictorUnavailable: return "PredictorUnavailable";
        case ErrorCode::ProtocolViolation: return "ProtocolViolation";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::UniformImage: return "UniformImage";
        case ErrorCode::EmptyAnnotation: return "EmptyAnnotation";
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::InsufficientClassMembers: return "InsufficientClassMembers";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

namespace {

void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::ZeroDimension,
                    "image size " + std::to_string(width) + "x" + std::to_string(height));
    }
}

std::size_t pixel_count(int width, int height) {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

GrayImage::GrayImage(int width, int height, float fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    if (!(fill >= 0.0f && fill <= 1.0f)) {
        throw Error(ErrorCode::InvalidArgument, "fill intensity outside [0,1]");
    }
    data_.assign(pixel_count(width, height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != pixel_count(width, height)) {
        throw Error(ErrorCode::InvalidArgument, "pixel buffer does not match dimensions");
    }
    for (float v : data_) {
        if (!(v >= 0.0f && v <= 1.0f)) {
            throw Error(ErrorCode::InvalidArgument, "intensity outside [0,1]");
        }
    }
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height), bits_(pixel_count(width, height), fill ? 1 : 0) {
    check_dims(width, height);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    check_dims(width, height);
    if (bits_.size() != pixel_count(width, height)) {
        throw Error(ErrorCode::InvalidArgument, "mask buffer does not match dimensions");
    }
    for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::area() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::operator&(const BinaryMask& other) const {
    if (!same_shape(other)) throw Error(ErrorCode::ShapeMismatch, "mask intersection");
    BinaryMask out(width_, height_);
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] & other.bits_[i];
    return out;
}

BinaryMask BinaryMask::operator|(const BinaryMask& other) const {
    if (!same_shape(other)) throw Error(ErrorCode::ShapeMismatch, "mask union");
    BinaryMask out(width_, height_);
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] | other.bits_[i];
    return out;
}

BinaryMask BinaryMask::operator~() const {
    BinaryMask out(width_, height_);
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] ^ 1;
    return out;
}

bool BinaryMask::subset_of(const BinaryMask& other) const {
    if (!same_shape(other)) throw Error(ErrorCode::ShapeMismatch, "mask subset test");
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] && !other.bits_[i]) return false;
    }
    return true;
}

GrayImage resize_normalize(const GrayImage& img, int side) {
    if (img.empty() || side < 1) {
        throw Error(ErrorCode::ZeroDimension, "cannot resize to side " + std::to_string(side));
    }
    const int w = img.width();
    const int h = img.height();
    const double sx = static_cast<double>(w) / side;
    const double sy = static_cast<double>(h) / side;

    std::vector<float> out(pixel_count(side, side));
    for (int y = 0; y < side; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(h - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, h - 1);
        const double ty = fy - y0;
        for (int x = 0; x < side; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(w - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, w - 1);
            const double tx = fx - x0;
            const double top = img.at(x0, y0) * (1.0 - tx) + img.at(x1, y0) * tx;
            const double bottom = img.at(x0, y1) * (1.0 - tx) + img.at(x1, y1) * tx;
            const double v = top * (1.0 - ty) + bottom * ty;
            out[static_cast<std::size_t>(y) * side + x] =
                std::clamp(static_cast<float>(v), 0.0f, 1.0f);
        }
    }
    return GrayImage(side, side, std::move(out));
}

}  // namespace limerefine
