#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "core/raster.hpp"

namespace weakseg {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// Axis-aligned box with fractional pixel coordinates, as stored by annotations.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  bool operator==(const Rect&) const = default;
};

using Quad = std::array<Point, 4>;

/// Integer pixel rectangle covering columns [x, x + w) and rows [y, y + h).
struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool operator==(const PixelRect&) const = default;
  int right() const { return x + w; }
  int bottom() const { return y + h; }
  bool empty() const { return w <= 0 || h <= 0; }
  bool contains(const PixelRect& other) const;
  bool contains(int px, int py) const {
    return px >= x && px < right() && py >= y && py < bottom();
  }
  PixelRect intersect(const PixelRect& other) const;
};

enum class Script { kLatin, kNonLatin, kUnknown };

const char* to_string(Script script);
Script script_from_string(const std::string& text);

struct TextBox {
  std::variant<Rect, Quad> geometry;
  bool legible = true;
  bool machine_printed = true;
  Script script = Script::kUnknown;
  std::optional<std::string> transcription;

  bool operator==(const TextBox&) const = default;

  bool is_quad() const { return std::holds_alternative<Quad>(geometry); }
  /// Smallest integer rectangle covering the geometry.
  PixelRect covering_rect() const;
  /// Throws if the geometry has no area.
  void validate() const;
};

/// A box usable for supervision: legible, machine printed, Latin script.
bool is_qualifying(const TextBox& box);

/// Area enclosed under the even-odd rule (both lobes of a self-crossing quad).
double polygon_area(const Quad& quad);

/// Grows `box` by `factor` of each dimension (split evenly between the two
/// sides, odd remainders going right/bottom) and clamps to the image. The
/// grown extent is ceil(w * (1 + factor)); pixels lost to clamping are not
/// redistributed.
PixelRect enlarge_box(const PixelRect& box, double factor, Size image);

/// Pixels whose centre lies inside the quad under the even-odd rule; centres
/// exactly on an edge count as inside.
BinaryMask rasterize_quad(const Quad& quad, Size image);

/// Membership mask for either geometry kind (rect uses the same centre rule).
BinaryMask rasterize_box(const TextBox& box, Size image);

}  // namespace weakseg
