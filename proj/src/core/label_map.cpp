#include "core/label_map.hpp"

#include <algorithm>
#include <string>

namespace weakseg {

LabelMap LabelMap::from_codes(Raster<std::uint8_t> codes) {
  for (std::uint8_t code : codes.data()) {
    if (!is_valid_label_code(code)) {
      throw format_error("label map contains invalid class code " + std::to_string(code));
    }
  }
  LabelMap map;
  map.codes_ = std::move(codes);
  return map;
}

std::array<std::size_t, 3> LabelMap::histogram() const {
  std::array<std::size_t, 3> counts{0, 0, 0};
  for (std::uint8_t code : codes_.data()) {
    if (code == 0) ++counts[0];
    else if (code == 1) ++counts[1];
    else ++counts[2];
  }
  return counts;
}

void ProbabilityCanvas::fuse(const Plane& patch, int x0, int y0) {
  if (x0 < 0 || y0 < 0 || x0 + patch.width() > prob_.width() ||
      y0 + patch.height() > prob_.height()) {
    throw invalid_argument("patch placement out of canvas bounds");
  }
  for (int y = 0; y < patch.height(); ++y) {
    for (int x = 0; x < patch.width(); ++x) {
      const double p = patch.at(x, y);
      if (!(p >= 0.0 && p <= 1.0)) throw invalid_argument("patch probability outside [0, 1]");
      double& cell = prob_.at(x0 + x, y0 + y);
      cell = std::max(cell, p);
      touched_.at(x0 + x, y0 + y) = 1;
    }
  }
}

}  // namespace weakseg
