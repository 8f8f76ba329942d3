#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace limerefine {

enum class DetectorKind { Canny, Laplace, Otsu };

std::string_view to_string(DetectorKind kind) noexcept;
/// Accepts "canny", "laplace", "otsu"; throws InvalidArgument otherwise.
DetectorKind parse_detector(std::string_view name);

enum class Degeneracy { FullImage, Blank, BlankInterior };

std::string_view to_string(Degeneracy d) noexcept;

}  // namespace limerefine
