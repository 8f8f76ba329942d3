#pragma once

// JSON wire protocol shared by the process and HTTP predictor clients:
//   request:  {"id": "<string>", "images": ["<base64 PNG>", ...]}
//   response: {"id": "<string>", "probs": [[p0, p1], ...]}

#include <span>
#include <string>
#include <vector>

#include "limerefine/image.hpp"
#include "limerefine/predictor.hpp"

namespace limerefine::wire {

struct Request {
    std::string id;
    std::vector<GrayImage> images;
};

struct Response {
    std::string id;
    std::vector<Prediction> probs;
};

/// Serialises to a single line (no embedded newlines).
std::string encode_request(const std::string& id, std::span<const GrayImage> images);
Request decode_request(const std::string& body);

std::string encode_response(const Response& response);
/// Throws ProtocolViolation on malformed JSON, mismatched id, wrong count or
/// probability pairs that do not sum to one.
Response decode_response(const std::string& body, const std::string& expected_id,
                         std::size_t expected_count);

}  // namespace limerefine::wire
