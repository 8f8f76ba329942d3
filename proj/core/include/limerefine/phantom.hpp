#pragma once

#include <cstdint>

#include "limerefine/image.hpp"

namespace limerefine {

/// Synthetic brain-like slice with ground truth.
struct Phantom {
    GrayImage image;
    BinaryMask brain;          // the ellipse, tumor included
    BinaryMask tumor;          // rasterised tumor_outline
    Polygon tumor_outline;     // what an annotator would draw
};

/// Dark background, textured mid-gray ellipse, one bright tumor blob inside
/// it and a bright scanner label in a corner outside it.
Phantom make_phantom(int size, std::uint64_t seed);

}  // namespace limerefine
