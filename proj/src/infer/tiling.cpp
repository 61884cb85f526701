#include "infer/tiling.hpp"

#include <algorithm>

namespace weakseg::infer {

namespace {

std::vector<int> axis_origins(int extent, int window, int stride) {
  std::vector<int> origins{0};
  int o = 0;
  while (o + window < extent) {
    o += stride;
    if (o + window >= extent) {
      origins.push_back(extent - window);
      break;
    }
    origins.push_back(o);
  }
  return origins;
}

}  // namespace

std::vector<PixelRect> TilingPlan::windows() const {
  std::vector<PixelRect> out;
  out.reserve(size());
  for (int y : ys)
    for (int x : xs) out.push_back({x, y, window, window});
  return out;
}

TilingPlan plan_tiling(Size image, int window, int stride) {
  if (image.width <= 0 || image.height <= 0) throw invalid_argument("cannot tile an empty image");
  if (window <= 0) throw invalid_argument("window size must be positive");
  if (stride <= 0 || stride > window) {
    throw invalid_argument("stride must be in [1, window] so that windows cover the image");
  }
  TilingPlan plan;
  plan.window = window;
  plan.stride = stride;
  plan.image = image;
  plan.xs = axis_origins(image.width, window, stride);
  plan.ys = axis_origins(image.height, window, stride);
  return plan;
}

Raster<int> coverage_counts(const TilingPlan& plan) {
  Raster<int> counts(plan.image, 0);
  const PixelRect frame{0, 0, plan.image.width, plan.image.height};
  for (const PixelRect& w : plan.windows()) {
    const PixelRect r = w.intersect(frame);
    for (int y = r.y; y < r.bottom(); ++y)
      for (int x = r.x; x < r.right(); ++x) ++counts.at(x, y);
  }
  return counts;
}

}  // namespace weakseg::infer
