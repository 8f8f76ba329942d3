#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "limerefine/image.hpp"

namespace limerefine {

/// Polygon regions keyed by image file name, as exported by VGG Image Annotator.
using AnnotationSet = std::map<std::string, std::vector<Polygon>>;

/// Accepts the plain per-image export, a project file with
/// "_via_img_metadata", and both list- and dict-shaped "regions".
/// Non-polygon shapes are skipped.
AnnotationSet parse_via_annotations(const std::string& json_text);
AnnotationSet load_via_annotations(const std::filesystem::path& path);

/// Writes polygons in the plain per-image export layout.
std::string via_annotations_to_json(const AnnotationSet& set);

/// Union of the rasterised polygons. Polygon coordinates are scaled by
/// (width / source_width, height / source_height).
BinaryMask tumor_mask(const std::vector<Polygon>& polygons, int width, int height,
                      int source_width, int source_height);

}  // namespace limerefine
