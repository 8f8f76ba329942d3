#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace limerefine {

enum class ErrorCode {
    UnreadableImage,
    ZeroDimension,
    DegeneratePolygon,
    ShapeMismatch,
    PredictorUnavailable,
    ProtocolViolation,
    SingularSystem,
    UniformImage,
    EmptyAnnotation,
    EmptyMask,
    InsufficientClassMembers,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (notably the CLI) can map it to a message or exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace limerefine
