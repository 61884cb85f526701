#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <jpeglib.h>

#include "core/error.hpp"
#include "core/geometry.hpp"
#include "core/image.hpp"
#include "core/label_io.hpp"
#include "core/label_map.hpp"
#include "support/oracles.hpp"

using namespace weakseg;
using weakseg::testing::brute_force_mask;
using weakseg::testing::count_set;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "weakseg_test_core";
  fs::create_directories(dir);
  return dir / name;
}

Quad rect_quad(double x, double y, double w, double h) {
  return {Point{x, y}, Point{x + w, y}, Point{x + w, y + h}, Point{x, y + h}};
}

void write_test_jpeg(const std::string& path, const RgbImage& img) {
  jpeg_compress_struct cinfo;
  jpeg_error_mgr jerr;
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  FILE* f = std::fopen(path.c_str(), "wb");
  REQUIRE(f != nullptr);
  jpeg_stdio_dest(&cinfo, f);
  cinfo.image_width = img.width;
  cinfo.image_height = img.height;
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, 100, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(img.pixels.data() + cinfo.next_scanline * img.width * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::fclose(f);
}

}  // namespace

TEST_CASE("enlarge_box examples") {
  const Size big{1000, 1000};
  CHECK(enlarge_box({100, 100, 20, 10}, 0.0, big) == PixelRect{100, 100, 20, 10});
  CHECK(enlarge_box({100, 100, 20, 10}, 0.3, big) == PixelRect{97, 99, 26, 13});
  const PixelRect clamped = enlarge_box({0, 0, 20, 10}, 0.3, big);
  CHECK(clamped == PixelRect{0, 0, 23, 12});
  CHECK_THROWS_WITH_AS(enlarge_box({5, 5, 0, 4}, 0.3, big), "degenerate box", Error);
  CHECK_THROWS_AS(enlarge_box({5, 5, 3, 4}, -0.1, big), Error);
}

TEST_CASE("enlarge_box properties on random boxes") {
  std::mt19937 gen(7);
  std::uniform_int_distribution<int> coord(-20, 120), extent(1, 60);
  std::uniform_real_distribution<double> factor(0.0, 1.5);
  const Size image{100, 80};
  const PixelRect frame{0, 0, image.width, image.height};
  for (int trial = 0; trial < 5000; ++trial) {
    const PixelRect b{coord(gen), coord(gen), extent(gen), extent(gen)};
    double f1 = factor(gen), f2 = factor(gen);
    if (f1 > f2) std::swap(f1, f2);
    const PixelRect r1 = enlarge_box(b, f1, image), r2 = enlarge_box(b, f2, image);
    CHECK(r2.contains(r1));
    CHECK(r1.contains(b.intersect(frame)));
    CHECK(frame.contains(r1));
    if (frame.contains(b)) CHECK(r1.contains(b));
    // Unclamped width is never below the analytic enlargement.
    const PixelRect inner{b.x + 1000, b.y + 1000, b.w, b.h};
    const PixelRect free = enlarge_box(inner, f1, {100000, 100000});
    CHECK(free.w >= b.w * (1 + f1) - 1e-6);
    CHECK(free.h >= b.h * (1 + f1) - 1e-6);
    CHECK(free.w < b.w * (1 + f1) + 1);
  }
}

TEST_CASE("rasterize_quad examples") {
  const BinaryMask square = rasterize_quad(rect_quad(2, 2, 3, 3), {10, 10});
  CHECK(count_set(square) == 9);
  for (int y = 2; y < 5; ++y)
    for (int x = 2; x < 5; ++x) CHECK(square.at(x, y) == 1);

  // Diamond centred in a 10x10 image: analytic area 2 * r^2.
  const double r = 3.5;
  const Quad diamond{Point{5, 5 - r}, Point{5 + r, 5}, Point{5, 5 + r}, Point{5 - r, 5}};
  const double area = polygon_area(diamond);
  CHECK(area == doctest::Approx(2 * r * r));
  const BinaryMask m = rasterize_quad(diamond, {10, 10});
  CHECK(std::abs(static_cast<double>(count_set(m)) - area) <= 2.0);
  CHECK(m == brute_force_mask(diamond, {10, 10}));

  CHECK_THROWS_AS(rasterize_quad(rect_quad(2, 2, 0, 3), {10, 10}), Error);
  CHECK_THROWS_AS(rasterize_quad({Point{0, 0}, Point{1, 1}, Point{2, 2}, Point{3, 3}}, {10, 10}), Error);
}

TEST_CASE("self-crossing quad encloses both lobes") {
  const Quad bowtie{Point{0, 0}, Point{4, 4}, Point{4, 0}, Point{0, 4}};
  CHECK(polygon_area(bowtie) == doctest::Approx(8.0));
  CHECK(rasterize_quad(bowtie, {6, 6}) == brute_force_mask(bowtie, {6, 6}));
  // Out-and-back along one segment encloses nothing.
  CHECK_THROWS_AS(rasterize_quad({Point{0, 0}, Point{3, 0}, Point{0, 0}, Point{0, 3}}, {6, 6}), Error);
}

TEST_CASE("rasterize_quad agrees with brute force on every quad over an 8x8 vertex grid") {
  // Rotations and reversals describe the same polygon, so one representative
  // per class is enough: the first vertex has the smallest index and the
  // second is smaller than the fourth.
  const Size size{8, 8};
  std::size_t compared = 0, mismatches = 0, degenerate = 0;
  for (int i0 = 0; i0 < 64; ++i0)
    for (int i1 = i0 + 1; i1 < 64; ++i1)
      for (int i2 = i0 + 1; i2 < 64; ++i2)
        for (int i3 = i1 + 1; i3 < 64; ++i3) {
          if (i2 == i1 || i2 == i3) continue;
          const Quad q{Point{double(i0 % 8), double(i0 / 8)}, Point{double(i1 % 8), double(i1 / 8)},
                       Point{double(i2 % 8), double(i2 / 8)}, Point{double(i3 % 8), double(i3 / 8)}};
          if (!(polygon_area(q) > 0.0)) {
            ++degenerate;
            continue;
          }
          ++compared;
          if (!(rasterize_quad(q, size) == brute_force_mask(q, size))) ++mismatches;
        }
  MESSAGE("compared " << compared << " quads, skipped " << degenerate << " degenerate");
  CHECK(compared > 1000000);
  CHECK(mismatches == 0);
}

TEST_CASE("rasterize_quad agrees with brute force on random fractional quads") {
  std::mt19937 gen(3);
  std::uniform_int_distribution<int> half(-4, 44);
  std::uniform_real_distribution<double> real(-3.0, 23.0);
  for (int trial = 0; trial < 4000; ++trial) {
    Quad q;
    for (Point& p : q) {
      // Mix half-integer vertices (which land on pixel centres) with arbitrary ones.
      p = trial % 2 ? Point{half(gen) * 0.5, half(gen) * 0.5} : Point{real(gen), real(gen)};
    }
    if (!(polygon_area(q) > 0.0)) continue;
    CHECK(rasterize_quad(q, {20, 20}) == brute_force_mask(q, {20, 20}));
  }
}

TEST_CASE("rect boxes follow the centre rule") {
  TextBox box;
  box.geometry = Rect{1.5, 0.2, 2.0, 1.0};
  BinaryMask m = rasterize_box(box, {6, 4});
  // Centres 1.5 and 3.5 sit on the left and right edges and count as inside.
  CHECK(count_set(m) == 3);
  for (int x = 1; x <= 3; ++x) CHECK(m.at(x, 0) == 1);
  box.geometry = Rect{2, 2, 3, 3};
  CHECK(rasterize_box(box, {10, 10}) == rasterize_quad(rect_quad(2, 2, 3, 3), {10, 10}));
  box.geometry = Rect{2, 2, 0, 3};
  CHECK_THROWS_WITH_AS(box.validate(), "degenerate box", Error);
}

TEST_CASE("text box attributes") {
  TextBox box;
  box.geometry = Rect{0, 0, 3, 3};
  box.script = Script::kLatin;
  CHECK(is_qualifying(box));
  box.legible = false;
  CHECK_FALSE(is_qualifying(box));
  box.legible = true;
  box.machine_printed = false;
  CHECK_FALSE(is_qualifying(box));
  box.machine_printed = true;
  box.script = Script::kUnknown;
  CHECK_FALSE(is_qualifying(box));
  for (Script s : {Script::kLatin, Script::kNonLatin, Script::kUnknown})
    CHECK(script_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(script_from_string("klingon"), Error);
  box.geometry = Quad{Point{0.5, 1}, Point{4.2, 1}, Point{4.2, 3.7}, Point{0.5, 3.7}};
  CHECK(box.covering_rect() == PixelRect{0, 1, 5, 3});
}

TEST_CASE("label map codes") {
  LabelMap map(4, 3);
  map.set(1, 1, Label::kForeground);
  map.set(2, 2, Label::kUncertain);
  const auto h = map.histogram();
  CHECK(h[0] == 10);
  CHECK(h[1] == 1);
  CHECK(h[2] == 1);
  CHECK(h[0] + h[1] + h[2] == 12);
  Raster<std::uint8_t> codes(2, 2, 0);
  codes.at(1, 1) = 2;
  CHECK_THROWS_AS(LabelMap::from_codes(codes), Error);
  codes.at(1, 1) = 255;
  CHECK(LabelMap::from_codes(codes).at(1, 1) == Label::kUncertain);
}

TEST_CASE("probability canvas max fusion") {
  ProbabilityCanvas canvas({6, 4});
  Plane a(3, 2, 0.4), b(3, 2, 0.9);
  canvas.fuse(a, 1, 1);
  canvas.fuse(b, 2, 1);
  CHECK(canvas.prob(1, 1) == 0.4);
  CHECK(canvas.prob(2, 1) == 0.9);
  CHECK(canvas.prob(4, 2) == 0.9);
  CHECK(canvas.prob(0, 0) == 0.0);
  CHECK_FALSE(canvas.touched(0, 0));
  CHECK(canvas.touched(1, 2));
  const ProbabilityCanvas snapshot = canvas;
  canvas.fuse(b, 2, 1);
  CHECK(canvas == snapshot);
  CHECK_THROWS_AS(canvas.fuse(b, 4, 0), Error);
  CHECK_THROWS_AS(canvas.fuse(b, -1, 0), Error);
  CHECK_THROWS_AS(canvas.fuse(Plane(1, 1, 1.5), 0, 0), Error);
}

TEST_CASE("label map png round trip with exact palette") {
  LabelMap map(5, 4);
  map.set(0, 0, Label::kForeground);
  map.set(4, 3, Label::kUncertain);
  map.set(2, 1, Label::kUncertain);
  const std::string path = scratch("labels.png").string();
  write_label_map(path, map);
  CHECK(read_label_map(path) == map);
  const IndexedImage raw = read_indexed_png(path);
  REQUIRE(raw.palette.size() == 3);
  CHECK(raw.palette[0] == Rgb{0, 0, 0});
  CHECK(raw.palette[1] == Rgb{255, 0, 0});
  CHECK(raw.palette[2] == Rgb{255, 255, 0});
  CHECK(raw.indices.at(4, 3) == 2);
  CHECK(raw.indices.at(0, 0) == 1);
  CHECK(is_indexed_png(path));
}

TEST_CASE("image io") {
  RgbImage img(7, 5, {10, 20, 30});
  img.set(3, 2, {255, 0, 128});
  const std::string png = scratch("rgb.png").string();
  write_rgb_png(png, img);
  CHECK(read_rgb(png) == img);
  CHECK(probe_size(png) == Size{7, 5});
  CHECK_FALSE(is_indexed_png(png));
  CHECK(img.crop(3, 2, 2, 2).at(0, 0) == Rgb{255, 0, 128});

  RgbImage flat(16, 8, {200, 100, 50});
  const std::string jpg = scratch("flat.jpg").string();
  write_test_jpeg(jpg, flat);
  const RgbImage decoded = read_rgb(jpg);
  CHECK(decoded.size() == Size{16, 8});
  CHECK(std::abs(int(decoded.at(5, 5)[0]) - 200) <= 3);
  CHECK(probe_size(jpg) == Size{16, 8});

  Raster<std::uint16_t> gray(3, 2, 0);
  gray.at(2, 1) = 65535;
  gray.at(1, 0) = 258;
  const std::string g16 = scratch("gray16.png").string();
  write_gray16_png(g16, gray);
  CHECK(read_gray16_png(g16) == gray);

  const std::string junk = scratch("junk.png").string();
  std::ofstream(junk) << "nope";
  CHECK_THROWS_AS(read_rgb(junk), Error);
  CHECK_THROWS_AS(read_rgb(scratch("missing.png").string()), Error);
}

TEST_CASE("ground truth encodings") {
  RgbImage img(3, 1, {255, 255, 255});
  img.set(1, 0, {0, 0, 0});
  img.set(2, 0, {12, 0, 0});
  const std::string path = scratch("gt.png").string();
  write_rgb_png(path, img);
  LabelMap nonzero = read_ground_truth(path, GtEncoding::kNonZero);
  CHECK(nonzero.at(0, 0) == Label::kForeground);
  CHECK(nonzero.at(1, 0) == Label::kBackground);
  CHECK(nonzero.at(2, 0) == Label::kForeground);
  LabelMap nonwhite = read_ground_truth(path, GtEncoding::kNonWhite);
  CHECK(nonwhite.at(0, 0) == Label::kBackground);
  CHECK(nonwhite.at(1, 0) == Label::kForeground);

  BinaryMask mask(3, 1, 0);
  mask.at(2, 0) = 1;
  const std::string bin = scratch("mask.png").string();
  write_binary_mask(bin, mask);
  CHECK(read_binary_mask(bin) == mask);
  for (GtEncoding e : {GtEncoding::kLabelMap, GtEncoding::kNonZero, GtEncoding::kNonWhite})
    CHECK(gt_encoding_from_string(to_string(e)) == e);
}
