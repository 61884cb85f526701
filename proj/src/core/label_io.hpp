#pragma once

#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/label_map.hpp"

namespace weakseg {

/// Palette of label-map PNGs: index 0 background (black), 1 foreground
/// (red), 2 uncertain (yellow).
inline const std::vector<Rgb>& label_palette() {
  static const std::vector<Rgb> palette{{0, 0, 0}, {255, 0, 0}, {255, 255, 0}};
  return palette;
}

/// Binary segmentations use the first two label-map entries.
inline const std::vector<Rgb>& binary_palette() {
  static const std::vector<Rgb> palette{{0, 0, 0}, {255, 0, 0}};
  return palette;
}

void write_label_map(const std::string& path, const LabelMap& labels);
LabelMap read_label_map(const std::string& path);

void write_binary_mask(const std::string& path, const BinaryMask& mask);
/// Indexed PNG: index > 0 is foreground. Other PNG/JPEG: any non-black pixel.
BinaryMask read_binary_mask(const std::string& path);

/// How a ground-truth image encodes text pixels.
enum class GtEncoding {
  kLabelMap,        // indexed PNG with the label palette indices
  kNonZero,         // any non-black pixel is text
  kNonWhite,        // any non-white pixel is text (white background)
};

const char* to_string(GtEncoding encoding);
GtEncoding gt_encoding_from_string(const std::string& text);

LabelMap read_ground_truth(const std::string& path, GtEncoding encoding);

}  // namespace weakseg
