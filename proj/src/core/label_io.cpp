#include "core/label_io.hpp"

namespace weakseg {

void write_label_map(const std::string& path, const LabelMap& labels) {
  Raster<std::uint8_t> indices(labels.size());
  const auto& codes = labels.codes().data();
  for (std::size_t i = 0; i < codes.size(); ++i) {
    indices.data()[i] = codes[i] == 255 ? 2 : codes[i];
  }
  write_indexed_png(path, indices, label_palette());
}

LabelMap read_label_map(const std::string& path) {
  IndexedImage image = read_indexed_png(path);
  Raster<std::uint8_t> codes(image.indices.size());
  for (std::size_t i = 0; i < codes.data().size(); ++i) {
    const std::uint8_t index = image.indices.data()[i];
    if (index > 2) {
      throw format_error("'" + path + "': palette index " + std::to_string(index) +
                         " is not a label class");
    }
    codes.data()[i] = index == 2 ? 255 : index;
  }
  return LabelMap::from_codes(std::move(codes));
}

void write_binary_mask(const std::string& path, const BinaryMask& mask) {
  Raster<std::uint8_t> indices(mask.size());
  for (std::size_t i = 0; i < indices.data().size(); ++i) {
    indices.data()[i] = mask.data()[i] ? 1 : 0;
  }
  write_indexed_png(path, indices, binary_palette());
}

BinaryMask read_binary_mask(const std::string& path) {
  if (is_indexed_png(path)) {
    IndexedImage image = read_indexed_png(path);
    BinaryMask mask(image.indices.size());
    for (std::size_t i = 0; i < mask.data().size(); ++i) mask.data()[i] = image.indices.data()[i] > 0;
    return mask;
  }
  RgbImage image = read_rgb(path);
  BinaryMask mask(image.size());
  for (std::size_t i = 0; i < mask.data().size(); ++i) {
    mask.data()[i] = (image.pixels[3 * i] | image.pixels[3 * i + 1] | image.pixels[3 * i + 2]) != 0;
  }
  return mask;
}

const char* to_string(GtEncoding encoding) {
  switch (encoding) {
    case GtEncoding::kLabelMap: return "labelmap";
    case GtEncoding::kNonZero: return "nonzero";
    case GtEncoding::kNonWhite: return "nonwhite";
  }
  return "nonzero";
}

GtEncoding gt_encoding_from_string(const std::string& text) {
  if (text == "labelmap") return GtEncoding::kLabelMap;
  if (text == "nonzero") return GtEncoding::kNonZero;
  if (text == "nonwhite") return GtEncoding::kNonWhite;
  throw format_error("unknown ground-truth encoding '" + text + "'");
}

LabelMap read_ground_truth(const std::string& path, GtEncoding encoding) {
  if (encoding == GtEncoding::kLabelMap) return read_label_map(path);
  if (encoding == GtEncoding::kNonZero && is_indexed_png(path)) {
    BinaryMask mask = read_binary_mask(path);
    LabelMap labels(mask.size());
    for (int y = 0; y < mask.height(); ++y) {
      for (int x = 0; x < mask.width(); ++x) {
        if (mask.at(x, y)) labels.set(x, y, Label::kForeground);
      }
    }
    return labels;
  }
  RgbImage image = read_rgb(path);
  LabelMap labels(image.size());
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Rgb p = image.at(x, y);
      const bool text = encoding == GtEncoding::kNonZero
                            ? (p[0] | p[1] | p[2]) != 0
                            : !(p[0] == 255 && p[1] == 255 && p[2] == 255);
      if (text) labels.set(x, y, Label::kForeground);
    }
  }
  return labels;
}

}  // namespace weakseg
