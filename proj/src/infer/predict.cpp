#include "infer/predict.hpp"

#include <algorithm>
#include <cmath>

#include "core/resample.hpp"

namespace weakseg::infer {

const char* to_string(Fusion fusion) { return fusion == Fusion::kMean ? "mean" : "max"; }

Fusion fusion_from_string(const std::string& text) {
  if (text == "mean") return Fusion::kMean;
  if (text == "max") return Fusion::kMax;
  throw invalid_argument("unknown fusion '" + text + "' (expected mean or max)");
}

void InferencePolicy::validate() const {
  if (scales.empty()) throw invalid_argument("scale set must not be empty");
  for (double s : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) throw invalid_argument("scales must be positive");
  }
  if (window <= 0) throw invalid_argument("window must be positive");
  if (stride <= 0 || stride > window) throw invalid_argument("stride must be in [1, window]");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw invalid_argument("threshold must be in [0, 1]");
}

Plane fuse_windows(Size size, const std::vector<PixelRect>& windows,
                   const std::vector<Plane>& predictions, Fusion fusion) {
  if (windows.size() != predictions.size()) throw invalid_argument("one prediction per window expected");
  Plane acc(size, 0.0);
  Raster<int> count(size, 0);
  const PixelRect frame{0, 0, size.width, size.height};
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const PixelRect& w = windows[i];
    const Plane& p = predictions[i];
    if (p.width() != w.w || p.height() != w.h) throw invalid_argument("prediction does not match its window");
    const PixelRect r = w.intersect(frame);
    for (int y = r.y; y < r.bottom(); ++y) {
      for (int x = r.x; x < r.right(); ++x) {
        const double v = p.at(x - w.x, y - w.y);
        double& a = acc.at(x, y);
        a = fusion == Fusion::kMean ? a + v : (count.at(x, y) == 0 ? v : std::max(a, v));
        ++count.at(x, y);
      }
    }
  }
  for (std::size_t i = 0; i < acc.data().size(); ++i) {
    const int c = count.data()[i];
    if (c == 0) throw runtime_error("tiling left a pixel uncovered");
    if (fusion == Fusion::kMean) acc.data()[i] /= c;
  }
  return acc;
}

namespace {

RgbImage padded_tile(const RgbImage& image, const PixelRect& w) {
  if (w.right() <= image.width && w.bottom() <= image.height) return image.crop(w.x, w.y, w.w, w.h);
  RgbImage tile(w.w, w.h, kPadColour);
  for (int y = 0; y < w.h && w.y + y < image.height; ++y)
    for (int x = 0; x < w.w && w.x + x < image.width; ++x) tile.set(x, y, image.at(w.x + x, w.y + y));
  return tile;
}

}  // namespace

Plane sliding_window_predict(ProbabilityModel& model, const RgbImage& image,
                             const InferencePolicy& policy) {
  policy.validate();
  const Size native = image.size();
  Plane total(native, 0.0);
  for (double scale : policy.scales) {
    const Size scaled{scaled_extent(native.width, scale), scaled_extent(native.height, scale)};
    const RgbImage resized = resize_bilinear(image, scaled);
    const TilingPlan plan = plan_tiling(scaled, policy.window, policy.stride);
    const std::vector<PixelRect> windows = plan.windows();
    std::vector<Plane> predictions;
    predictions.reserve(windows.size());
    for (const PixelRect& w : windows) {
      Plane p = model.predict(padded_tile(resized, w));
      if (p.width() != w.w || p.height() != w.h) throw runtime_error("model returned a plane of the wrong size");
      predictions.push_back(std::move(p));
    }
    const Plane fused = resize_bilinear(fuse_windows(scaled, windows, predictions, policy.fusion), native);
    for (std::size_t i = 0; i < total.data().size(); ++i) total.data()[i] += fused.data()[i];
  }
  for (double& v : total.data()) v = std::clamp(v / static_cast<double>(policy.scales.size()), 0.0, 1.0);
  return total;
}

BinaryMask binarize(const Plane& prob, double threshold) {
  BinaryMask mask(prob.size(), 0);
  for (std::size_t i = 0; i < prob.data().size(); ++i) mask.data()[i] = prob.data()[i] > threshold ? 1 : 0;
  return mask;
}

Raster<std::uint16_t> quantize_probability(const Plane& prob) {
  Raster<std::uint16_t> out(prob.size(), 0);
  for (std::size_t i = 0; i < prob.data().size(); ++i) {
    out.data()[i] = static_cast<std::uint16_t>(std::lround(std::clamp(prob.data()[i], 0.0, 1.0) * 65535.0));
  }
  return out;
}

}  // namespace weakseg::infer
