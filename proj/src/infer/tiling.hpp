#pragma once

#include <vector>

#include "core/geometry.hpp"

namespace weakseg::infer {

/// Window origins along each axis. Images smaller than the window are
/// processed as if padded up to the window size.
struct TilingPlan {
  int window = 0;
  int stride = 0;
  Size image;
  std::vector<int> xs;
  std::vector<int> ys;

  std::size_t size() const { return xs.size() * ys.size(); }
  /// Row-major list of windows; they may extend past a small image.
  std::vector<PixelRect> windows() const;
};

/// Origins 0, stride, 2*stride, ... with the last one snapped so the final
/// window ends exactly on the image edge.
TilingPlan plan_tiling(Size image, int window, int stride);

/// Per-pixel number of windows covering it.
Raster<int> coverage_counts(const TilingPlan& plan);

}  // namespace weakseg::infer
