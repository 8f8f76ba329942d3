#include "limerefine/annotations.hpp"

#include <fstream>
#include <iterator>

#include "json.hpp"
#include "limerefine/error.hpp"
#include "limerefine/mask_ops.hpp"

namespace limerefine {

namespace {

using nlohmann::json;

void collect_region(const json& region, std::vector<Polygon>& out) {
    if (!region.is_object() || !region.contains("shape_attributes")) return;
    const auto& shape = region["shape_attributes"];
    if (!shape.is_object() || shape.value("name", "") != "polygon") return;
    const auto& xs = shape.at("all_points_x");
    const auto& ys = shape.at("all_points_y");
    if (!xs.is_array() || !ys.is_array() || xs.size() != ys.size()) {
        throw Error(ErrorCode::InvalidArgument, "polygon point lists differ in length");
    }
    Polygon poly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        poly.vertices.push_back({xs[i].get<double>(), ys[i].get<double>()});
    }
    out.push_back(std::move(poly));
}

}  // namespace

AnnotationSet parse_via_annotations(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("annotation JSON: ") + e.what());
    }
    if (root.is_object() && root.contains("_via_img_metadata")) root = root["_via_img_metadata"];
    if (!root.is_object()) throw Error(ErrorCode::InvalidArgument, "annotation JSON must be an object");

    AnnotationSet set;
    try {
        for (const auto& [key, entry] : root.items()) {
            if (!entry.is_object()) continue;
            const std::string filename = entry.value("filename", key);
            auto& polys = set[filename];
            if (!entry.contains("regions")) continue;
            const auto& regions = entry["regions"];
            if (regions.is_array()) {
                for (const auto& r : regions) collect_region(r, polys);
            } else if (regions.is_object()) {
                for (const auto& [rk, r] : regions.items()) collect_region(r, polys);
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("annotation JSON: ") + e.what());
    }
    return set;
}

AnnotationSet load_via_annotations(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
    return parse_via_annotations(std::string{std::istreambuf_iterator<char>(is), {}});
}

std::string via_annotations_to_json(const AnnotationSet& set) {
    nlohmann::ordered_json root = nlohmann::ordered_json::object();
    for (const auto& [filename, polys] : set) {
        nlohmann::ordered_json entry;
        entry["filename"] = filename;
        entry["size"] = -1;
        auto regions = nlohmann::ordered_json::array();
        for (const auto& poly : polys) {
            nlohmann::ordered_json shape;
            shape["name"] = "polygon";
            auto xs = nlohmann::ordered_json::array();
            auto ys = nlohmann::ordered_json::array();
            for (const auto& v : poly.vertices) {
                xs.push_back(v.x);
                ys.push_back(v.y);
            }
            shape["all_points_x"] = std::move(xs);
            shape["all_points_y"] = std::move(ys);
            regions.push_back({{"shape_attributes", std::move(shape)},
                               {"region_attributes", nlohmann::ordered_json::object()}});
        }
        entry["regions"] = std::move(regions);
        entry["file_attributes"] = nlohmann::ordered_json::object();
        root[filename] = std::move(entry);
    }
    return root.dump(2) + "\n";
}

BinaryMask tumor_mask(const std::vector<Polygon>& polygons, int width, int height,
                      int source_width, int source_height) {
    if (source_width <= 0 || source_height <= 0) {
        throw Error(ErrorCode::ZeroDimension, "annotation source size");
    }
    const double sx = static_cast<double>(width) / source_width;
    const double sy = static_cast<double>(height) / source_height;
    BinaryMask mask(width, height);
    for (const auto& poly : polygons) {
        Polygon scaled = poly;
        for (auto& v : scaled.vertices) {
            v.x *= sx;
            v.y *= sy;
        }
        mask = mask | rasterize_polygon(scaled, width, height);
    }
    return mask;
}

}  // namespace limerefine
