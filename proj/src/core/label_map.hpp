#pragma once

#include <array>
#include <cstdint>

#include "core/raster.hpp"

namespace weakseg {

enum class Label : std::uint8_t {
  kBackground = 0,
  kForeground = 1,
  kUncertain = 255,
};

inline bool is_valid_label_code(std::uint8_t code) {
  return code == 0 || code == 1 || code == 255;
}

/// Per-pixel three-class annotation. Construction and mutation keep every
/// pixel within {background, foreground, uncertain}.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(int width, int height, Label fill = Label::kBackground)
      : codes_(width, height, static_cast<std::uint8_t>(fill)) {}
  explicit LabelMap(Size size, Label fill = Label::kBackground)
      : LabelMap(size.width, size.height, fill) {}

  /// Throws on any code outside the three classes.
  static LabelMap from_codes(Raster<std::uint8_t> codes);

  int width() const { return codes_.width(); }
  int height() const { return codes_.height(); }
  Size size() const { return codes_.size(); }

  Label at(int x, int y) const { return static_cast<Label>(codes_.at(x, y)); }
  void set(int x, int y, Label label) { codes_.at(x, y) = static_cast<std::uint8_t>(label); }

  const Raster<std::uint8_t>& codes() const { return codes_; }

  std::array<std::size_t, 3> histogram() const;  // {bg, fg, uncertain}

  bool operator==(const LabelMap&) const = default;

 private:
  Raster<std::uint8_t> codes_;
};

/// Full-image foreground probability accumulator. Each fused patch raises a
/// pixel to the maximum probability seen; untouched pixels stay at zero.
class ProbabilityCanvas {
 public:
  ProbabilityCanvas() = default;
  explicit ProbabilityCanvas(Size size) : prob_(size, 0.0), touched_(size, 0) {}

  Size size() const { return prob_.size(); }
  double prob(int x, int y) const { return prob_.at(x, y); }
  bool touched(int x, int y) const { return touched_.at(x, y) != 0; }

  const Plane& probabilities() const { return prob_; }
  const BinaryMask& touched_mask() const { return touched_; }

  /// prob <- max(prob, patch) over the patch footprint at (x0, y0).
  void fuse(const Plane& patch, int x0, int y0);

  bool operator==(const ProbabilityCanvas&) const = default;

 private:
  Plane prob_;
  BinaryMask touched_;
};

}  // namespace weakseg
