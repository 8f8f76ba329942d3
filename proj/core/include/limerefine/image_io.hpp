#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "limerefine/image.hpp"

namespace limerefine {

/// Decodes a PNG or JPEG file into [0, 1] grayscale. Colour inputs are
/// reduced by the unweighted mean of their first three channels.
GrayImage load_gray(const std::filesystem::path& path);
GrayImage decode_gray(std::span<const std::uint8_t> encoded);

/// 8-bit single channel PNG, intensities rounded to 0..255.
std::vector<std::uint8_t> encode_png(const GrayImage& img);
std::vector<std::uint8_t> encode_png(const BinaryMask& mask);
std::vector<std::uint8_t> encode_png(const RgbImage& img);

void write_png(const std::filesystem::path& path, const GrayImage& img);
void write_png(const std::filesystem::path& path, const BinaryMask& mask);
void write_png(const std::filesystem::path& path, const RgbImage& img);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace limerefine
