#include "limerefine/image_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "limerefine/error.hpp"

namespace limerefine {

namespace {

bool looks_like_png_or_jpeg(std::span<const std::uint8_t> bytes) {
    static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (bytes.size() >= sizeof(kPng) && std::equal(std::begin(kPng), std::end(kPng), bytes.begin())) {
        return true;
    }
    return bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff;
}

GrayImage from_mat(const cv::Mat& mat) {
    if (mat.empty() || mat.cols == 0 || mat.rows == 0) {
        throw Error(ErrorCode::ZeroDimension, "decoded image has no pixels");
    }
    double scale = 0.0;
    switch (mat.depth()) {
        case CV_8U: scale = 1.0 / 255.0; break;
        case CV_16U: scale = 1.0 / 65535.0; break;
        default: throw Error(ErrorCode::UnreadableImage, "unsupported sample depth");
    }
    const int channels = mat.channels();
    const int colour = std::min(channels, 3);  // alpha is ignored
    std::vector<float> data(static_cast<std::size_t>(mat.cols) * mat.rows);
    for (int y = 0; y < mat.rows; ++y) {
        for (int x = 0; x < mat.cols; ++x) {
            double sum = 0.0;
            for (int c = 0; c < colour; ++c) {
                if (mat.depth() == CV_8U) {
                    sum += mat.ptr<std::uint8_t>(y)[x * channels + c];
                } else {
                    sum += mat.ptr<std::uint16_t>(y)[x * channels + c];
                }
            }
            const double v = sum / colour * scale;
            data[static_cast<std::size_t>(y) * mat.cols + x] =
                std::clamp(static_cast<float>(v), 0.0f, 1.0f);
        }
    }
    return GrayImage(mat.cols, mat.rows, std::move(data));
}

std::uint8_t to_byte(float v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

std::vector<std::uint8_t> encode_mat(const cv::Mat& mat) {
    std::vector<std::uint8_t> out;
    if (!cv::imencode(".png", mat, out)) {
        throw Error(ErrorCode::InvalidArgument, "PNG encoding failed");
    }
    return out;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream os(path, std::ios::binary);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
}

}  // namespace

GrayImage decode_gray(std::span<const std::uint8_t> encoded) {
    if (!looks_like_png_or_jpeg(encoded)) {
        throw Error(ErrorCode::UnreadableImage, "not a PNG or JPEG stream");
    }
    cv::Mat buf(1, static_cast<int>(encoded.size()), CV_8U,
                const_cast<std::uint8_t*>(encoded.data()));
    cv::Mat mat = cv::imdecode(buf, cv::IMREAD_UNCHANGED);
    if (mat.empty()) throw Error(ErrorCode::UnreadableImage, "decoder rejected the stream");
    return from_mat(mat);
}

GrayImage load_gray(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::UnreadableImage, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(is), {}};
    try {
        return decode_gray(bytes);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnreadableImage) {
            throw Error(ErrorCode::UnreadableImage, path.string() + ": " + e.what());
        }
        throw;
    }
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
    cv::Mat mat(img.height(), img.width(), CV_8U);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) mat.at<std::uint8_t>(y, x) = to_byte(img.at(x, y));
    }
    return encode_mat(mat);
}

std::vector<std::uint8_t> encode_png(const BinaryMask& mask) {
    cv::Mat mat(mask.height(), mask.width(), CV_8U);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) mat.at<std::uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
    }
    return encode_mat(mat);
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
    cv::Mat mat(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* p = img.pixel(x, y);
            mat.at<cv::Vec3b>(y, x) = cv::Vec3b(p[2], p[1], p[0]);
        }
    }
    return encode_mat(mat);
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
    write_bytes(path, encode_png(img));
}

void write_png(const std::filesystem::path& path, const BinaryMask& mask) {
    write_bytes(path, encode_png(mask));
}

void write_png(const std::filesystem::path& path, const RgbImage& img) {
    write_bytes(path, encode_png(img));
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0) throw Error(ErrorCode::ProtocolViolation, "bad base64 length");
    std::vector<std::uint8_t> out(3 * text.size() / 4);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                  static_cast<int>(text.size()));
    if (n < 0) throw Error(ErrorCode::ProtocolViolation, "bad base64 payload");
    std::size_t padding = 0;
    for (auto it = text.rbegin(); it != text.rend() && *it == '=' && padding < 2; ++it) ++padding;
    out.resize(static_cast<std::size_t>(n) - padding);
    return out;
}

}  // namespace limerefine
