#pragma once

#include <cstdint>

#include "core/image.hpp"
#include "core/raster.hpp"

namespace weakseg {

// Half-pixel-centre resampling: output pixel i samples the source at
// (i + 0.5) * in / out - 0.5, edges clamped.

Plane resize_bilinear(const Plane& plane, Size size);
RgbImage resize_bilinear(const RgbImage& image, Size size);

/// Nearest-neighbour: never produces a value absent from the source.
Raster<std::uint8_t> resize_nearest(const Raster<std::uint8_t>& raster, Size size);

/// round(extent * scale), at least 1.
int scaled_extent(int extent, double scale);

}  // namespace weakseg
