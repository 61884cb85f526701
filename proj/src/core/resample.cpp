#include "core/resample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace weakseg {

namespace {

struct Tap {
  int lo, hi;
  double w_hi;
};

std::vector<Tap> taps(int in, int out) {
  std::vector<Tap> t(static_cast<std::size_t>(out));
  const double ratio = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    const double src = std::clamp((i + 0.5) * ratio - 0.5, 0.0, static_cast<double>(in - 1));
    const int lo = static_cast<int>(std::floor(src));
    t[i] = {lo, std::min(lo + 1, in - 1), src - lo};
  }
  return t;
}

void check_sizes(Size in, Size out) {
  if (in.width <= 0 || in.height <= 0 || out.width <= 0 || out.height <= 0) {
    throw invalid_argument("resize of an empty image");
  }
}

}  // namespace

int scaled_extent(int extent, double scale) {
  return std::max(1, static_cast<int>(std::lround(extent * scale)));
}

Plane resize_bilinear(const Plane& plane, Size size) {
  check_sizes(plane.size(), size);
  if (plane.size() == size) return plane;
  const auto tx = taps(plane.width(), size.width), ty = taps(plane.height(), size.height);
  Plane out(size);
  for (int y = 0; y < size.height; ++y) {
    const Tap& a = ty[y];
    for (int x = 0; x < size.width; ++x) {
      const Tap& b = tx[x];
      const double top = plane.at(b.lo, a.lo) * (1 - b.w_hi) + plane.at(b.hi, a.lo) * b.w_hi;
      const double bottom = plane.at(b.lo, a.hi) * (1 - b.w_hi) + plane.at(b.hi, a.hi) * b.w_hi;
      out.at(x, y) = top * (1 - a.w_hi) + bottom * a.w_hi;
    }
  }
  return out;
}

RgbImage resize_bilinear(const RgbImage& image, Size size) {
  check_sizes(image.size(), size);
  if (image.size() == size) return image;
  const auto tx = taps(image.width, size.width), ty = taps(image.height, size.height);
  RgbImage out(size.width, size.height);
  for (int y = 0; y < size.height; ++y) {
    const Tap& a = ty[y];
    for (int x = 0; x < size.width; ++x) {
      const Tap& b = tx[x];
      const Rgb p00 = image.at(b.lo, a.lo), p01 = image.at(b.hi, a.lo);
      const Rgb p10 = image.at(b.lo, a.hi), p11 = image.at(b.hi, a.hi);
      Rgb v;
      for (int c = 0; c < 3; ++c) {
        const double top = p00[c] * (1 - b.w_hi) + p01[c] * b.w_hi;
        const double bottom = p10[c] * (1 - b.w_hi) + p11[c] * b.w_hi;
        v[c] = static_cast<std::uint8_t>(std::clamp(std::lround(top * (1 - a.w_hi) + bottom * a.w_hi), 0L, 255L));
      }
      out.set(x, y, v);
    }
  }
  return out;
}

Raster<std::uint8_t> resize_nearest(const Raster<std::uint8_t>& raster, Size size) {
  check_sizes(raster.size(), size);
  if (raster.size() == size) return raster;
  auto source = [](int i, int in, int out) {
    return std::min(in - 1, static_cast<int>(std::floor((i + 0.5) * in / out)));
  };
  Raster<std::uint8_t> out(size);
  for (int y = 0; y < size.height; ++y) {
    const int sy = source(y, raster.height(), size.height);
    for (int x = 0; x < size.width; ++x) out.at(x, y) = raster.at(source(x, raster.width(), size.width), sy);
  }
  return out;
}

}  // namespace weakseg
