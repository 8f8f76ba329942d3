#pragma once

#include <vector>

#include "limerefine/image.hpp"

namespace limerefine {

enum class Connectivity { Four = 4, Eight = 8 };

/// Pixel (x, y) is set iff its centre (x + 0.5, y + 0.5) lies inside the
/// polygon under the even-odd rule. Centres exactly on an edge count as
/// inside. Throws DegeneratePolygon for fewer than three distinct vertices.
BinaryMask rasterize_polygon(const Polygon& poly, int width, int height);

/// Components sorted by area (descending); equal areas are ordered by their
/// first set pixel in raster order.
std::vector<BinaryMask> connected_components(const BinaryMask& mask, Connectivity conn);

/// Complement of the background reachable (4-connected) from the frame border.
BinaryMask fill_holes(const BinaryMask& mask);

/// Set pixels with at least one 4-neighbour outside the mask or off-frame.
BinaryMask inner_boundary(const BinaryMask& mask);

}  // namespace limerefine
