#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/raster.hpp"

namespace weakseg {

using Rgb = std::array<std::uint8_t, 3>;

/// Interleaved 8-bit RGB image.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // width * height * 3

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {0, 0, 0});

  Size size() const { return {width, height}; }
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb rgb);
  RgbImage crop(int x0, int y0, int w, int h) const;

  bool operator==(const RgbImage&) const = default;
};

struct IndexedImage {
  Raster<std::uint8_t> indices;
  std::vector<Rgb> palette;
};

// Image files are PNG (any colour type) or baseline JPEG; the decoder is
// picked from the file signature.
RgbImage read_rgb(const std::string& path);
Size probe_size(const std::string& path);
bool is_indexed_png(const std::string& path);

void write_rgb_png(const std::string& path, const RgbImage& image);

IndexedImage read_indexed_png(const std::string& path);
void write_indexed_png(const std::string& path, const Raster<std::uint8_t>& indices,
                       const std::vector<Rgb>& palette);

Raster<std::uint16_t> read_gray16_png(const std::string& path);
void write_gray16_png(const std::string& path, const Raster<std::uint16_t>& image);

}  // namespace weakseg
