#pragma once

#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/raster.hpp"
#include "infer/tiling.hpp"

namespace weakseg::infer {

/// Anything producing a per-pixel foreground probability for an RGB tile.
/// The returned plane must have the tile's size.
class ProbabilityModel {
 public:
  virtual ~ProbabilityModel() = default;
  virtual Plane predict(const RgbImage& tile) = 0;
};

enum class Fusion { kMean, kMax };
const char* to_string(Fusion fusion);
Fusion fusion_from_string(const std::string& text);

struct InferencePolicy {
  std::vector<double> scales{0.75, 1.0, 1.25};
  int window = 281;
  int stride = 140;
  Fusion fusion = Fusion::kMean;
  double threshold = 0.5;

  void validate() const;
  bool operator==(const InferencePolicy&) const = default;
};

/// Pixel value used to pad tiles that extend past a small image.
inline constexpr Rgb kPadColour{124, 116, 104};

/// Combines window predictions into a full map. Windows may extend past
/// `size`; only the in-image part contributes. Mean fusion divides the
/// per-pixel sum by the coverage count.
Plane fuse_windows(Size size, const std::vector<PixelRect>& windows,
                   const std::vector<Plane>& predictions, Fusion fusion);

/// Multi-scale sliding-window prediction at the image's native resolution.
Plane sliding_window_predict(ProbabilityModel& model, const RgbImage& image,
                             const InferencePolicy& policy);

/// Foreground iff prob > threshold.
BinaryMask binarize(const Plane& prob, double threshold);

/// round(p * 65535) per pixel, for 16-bit probability PNGs.
Raster<std::uint16_t> quantize_probability(const Plane& prob);

}  // namespace weakseg::infer
