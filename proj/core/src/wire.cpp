#include "limerefine/wire.hpp"

#include <cmath>

#include "json.hpp"
#include "limerefine/error.hpp"
#include "limerefine/image_io.hpp"

namespace limerefine::wire {

using nlohmann::json;

std::string encode_request(const std::string& id, std::span<const GrayImage> images) {
    json body;
    body["id"] = id;
    json arr = json::array();
    for (const auto& img : images) arr.push_back(base64_encode(encode_png(img)));
    body["images"] = std::move(arr);
    return body.dump();
}

Request decode_request(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ProtocolViolation, std::string("request is not JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("images") ||
        !j["images"].is_array()) {
        throw Error(ErrorCode::ProtocolViolation, "request needs string \"id\" and array \"images\"");
    }
    Request req;
    req.id = j["id"].get<std::string>();
    for (const auto& item : j["images"]) {
        if (!item.is_string()) throw Error(ErrorCode::ProtocolViolation, "image entry is not a string");
        const auto bytes = base64_decode(item.get<std::string>());
        try {
            req.images.push_back(decode_gray(bytes));
        } catch (const Error& e) {
            throw Error(ErrorCode::ProtocolViolation, e.what());
        }
    }
    return req;
}

std::string encode_response(const Response& response) {
    json body;
    body["id"] = response.id;
    json probs = json::array();
    for (const auto& p : response.probs) probs.push_back(json::array({p.p_no_tumor, p.p_tumor}));
    body["probs"] = std::move(probs);
    return body.dump();
}

Response decode_response(const std::string& body, const std::string& expected_id,
                         std::size_t expected_count) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ProtocolViolation, std::string("response is not JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
        throw Error(ErrorCode::ProtocolViolation, "response lacks a string \"id\"");
    }
    Response out;
    out.id = j["id"].get<std::string>();
    if (out.id != expected_id) {
        throw Error(ErrorCode::ProtocolViolation,
                    "response id \"" + out.id + "\" does not match request \"" + expected_id + "\"");
    }
    if (!j.contains("probs") || !j["probs"].is_array()) {
        throw Error(ErrorCode::ProtocolViolation, "response lacks \"probs\"");
    }
    const auto& probs = j["probs"];
    if (probs.size() != expected_count) {
        throw Error(ErrorCode::ProtocolViolation,
                    "expected " + std::to_string(expected_count) + " probability pairs, got " +
                        std::to_string(probs.size()));
    }
    for (const auto& pair : probs) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
            throw Error(ErrorCode::ProtocolViolation, "probability entry is not a numeric pair");
        }
        out.probs.push_back(make_prediction(pair[0].get<double>(), pair[1].get<double>()));
    }
    return out;
}

}  // namespace limerefine::wire
