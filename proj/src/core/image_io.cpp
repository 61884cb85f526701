#include <png.h>
#include <stdio.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>

// jpeglib.h needs FILE/size_t declared first.
#include <jpeglib.h>

#include "core/error.hpp"
#include "core/image.hpp"

namespace weakseg {

RgbImage::RgbImage(int w, int h, Rgb fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw invalid_argument("negative image size");
  pixels.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill[0];
    pixels[i + 1] = fill[1];
    pixels[i + 2] = fill[2];
  }
}

Rgb RgbImage::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void RgbImage::set(int x, int y, Rgb rgb) {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = rgb[0];
  pixels[i + 1] = rgb[1];
  pixels[i + 2] = rgb[2];
}

RgbImage RgbImage::crop(int x0, int y0, int w, int h) const {
  if (x0 < 0 || y0 < 0 || w < 0 || h < 0 || x0 + w > width || y0 + h > height) {
    throw invalid_argument("crop outside image");
  }
  RgbImage out(w, h);
  for (int y = 0; y < h; ++y) {
    std::memcpy(&out.pixels[static_cast<std::size_t>(y) * w * 3],
                &pixels[(static_cast<std::size_t>(y0 + y) * width + x0) * 3],
                static_cast<std::size_t>(w) * 3);
  }
  return out;
}

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  if (mode[0] == 'w') {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  }
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw io_error("cannot open '" + path + "': " + std::strerror(errno));
  return f;
}

enum class FileKind { kPng, kJpeg, kUnknown };

FileKind sniff(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  unsigned char sig[8] = {0};
  in.read(reinterpret_cast<char*>(sig), 8);
  if (in.gcount() >= 8 && png_sig_cmp(sig, 0, 8) == 0) return FileKind::kPng;
  if (in.gcount() >= 3 && sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) return FileKind::kJpeg;
  return FileKind::kUnknown;
}

// ---- PNG -------------------------------------------------------------------

struct PngErrorState {
  std::jmp_buf jump;
  char message[256] = {0};
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  std::longjmp(state->jump, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

class PngReader {
 public:
  explicit PngReader(const std::string& path) : path_(path), file_(open_file(path, "rb")) {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err_, png_error_fn, png_warning_fn);
    if (!png_) throw runtime_error("png_create_read_struct failed");
    info_ = png_create_info_struct(png_);
    if (!info_) throw runtime_error("png_create_info_struct failed");
  }
  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }
  FILE* file() const { return file_.get(); }
  PngErrorState& err() { return err_; }
  Error failure() const { return format_error("PNG '" + path_ + "': " + err_.message); }

 private:
  std::string path_;
  FilePtr file_;
  PngErrorState err_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class PngWriter {
 public:
  explicit PngWriter(const std::string& path) : path_(path), file_(open_file(path, "wb")) {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err_, png_error_fn, png_warning_fn);
    if (!png_) throw runtime_error("png_create_write_struct failed");
    info_ = png_create_info_struct(png_);
    if (!info_) throw runtime_error("png_create_info_struct failed");
  }
  ~PngWriter() { png_destroy_write_struct(&png_, &info_); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }
  FILE* file() const { return file_.get(); }
  PngErrorState& err() { return err_; }
  Error failure() const { return io_error("PNG '" + path_ + "': " + err_.message); }

 private:
  std::string path_;
  FilePtr file_;
  PngErrorState err_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

// Reads rows after transforms have been configured. `buffer` must outlive the
// call and is sized by the caller from png_get_rowbytes.
bool png_read_rows_into(PngReader& r, std::vector<png_byte>& buffer, std::vector<png_bytep>& rows,
                        int height) {
  if (setjmp(r.err().jump)) return false;
  png_read_update_info(r.png(), r.info());
  const std::size_t rowbytes = png_get_rowbytes(r.png(), r.info());
  buffer.resize(rowbytes * static_cast<std::size_t>(height));
  rows.resize(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[y] = buffer.data() + rowbytes * static_cast<std::size_t>(y);
  png_read_image(r.png(), rows.data());
  png_read_end(r.png(), nullptr);
  return true;
}

struct PngHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

bool png_read_header(PngReader& r, PngHeader& h) {
  if (setjmp(r.err().jump)) return false;
  png_init_io(r.png(), r.file());
  png_read_info(r.png(), r.info());
  png_get_IHDR(r.png(), r.info(), &h.width, &h.height, &h.bit_depth, &h.color_type, nullptr,
               nullptr, nullptr);
  return true;
}

bool png_configure_rgb(PngReader& r, const PngHeader& h) {
  if (setjmp(r.err().jump)) return false;
  if (h.color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png());
  if (h.color_type == PNG_COLOR_TYPE_GRAY && h.bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png());
  if (h.bit_depth == 16) png_set_strip_16(r.png());
  if (h.color_type == PNG_COLOR_TYPE_GRAY || h.color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(r.png());
  }
  png_set_strip_alpha(r.png());
  if (png_get_valid(r.png(), r.info(), PNG_INFO_tRNS)) {
    // Transparency is ignored; the expanded alpha is stripped again.
    png_set_tRNS_to_alpha(r.png());
  }
  return true;
}

RgbImage read_png_rgb(const std::string& path) {
  PngReader reader(path);
  PngHeader header;
  if (!png_read_header(reader, header)) throw reader.failure();
  if (!png_configure_rgb(reader, header)) throw reader.failure();
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  if (!png_read_rows_into(reader, buffer, rows, static_cast<int>(header.height))) {
    throw reader.failure();
  }
  RgbImage image(static_cast<int>(header.width), static_cast<int>(header.height));
  const std::size_t stride = static_cast<std::size_t>(header.width) * 3;
  for (png_uint_32 y = 0; y < header.height; ++y) {
    std::memcpy(&image.pixels[y * stride], rows[y], stride);
  }
  return image;
}

bool png_write_all(PngWriter& w, int width, int height, int bit_depth, int color_type,
                   const std::vector<png_color>* palette, std::vector<png_bytep>& rows) {
  if (setjmp(w.err().jump)) return false;
  png_init_io(w.png(), w.file());
  png_set_IHDR(w.png(), w.info(), static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (palette) {
    png_set_PLTE(w.png(), w.info(), palette->data(), static_cast<int>(palette->size()));
  }
  png_write_info(w.png(), w.info());
  png_write_image(w.png(), rows.data());
  png_write_end(w.png(), nullptr);
  return true;
}

// ---- JPEG ------------------------------------------------------------------

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX] = {0};
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

bool jpeg_decode(jpeg_decompress_struct& cinfo, JpegError& err, FILE* file,
                 std::vector<std::uint8_t>& out, int& width, int& height, bool header_only) {
  if (setjmp(err.jump)) return false;
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  if (header_only) {
    width = static_cast<int>(cinfo.image_width);
    height = static_cast<int>(cinfo.image_height);
    return true;
  }
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  const std::size_t stride = static_cast<std::size_t>(width) * 3;
  out.resize(stride * static_cast<std::size_t>(height));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.data() + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  return true;
}

RgbImage read_jpeg(const std::string& path, bool header_only) {
  FilePtr file = open_file(path, "rb");
  jpeg_decompress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  std::vector<std::uint8_t> data;
  int width = 0;
  int height = 0;
  const bool ok = jpeg_decode(cinfo, err, file.get(), data, width, height, header_only);
  jpeg_destroy_decompress(&cinfo);
  if (!ok) throw format_error("JPEG '" + path + "': " + err.message);
  RgbImage image;
  image.width = width;
  image.height = height;
  image.pixels = std::move(data);
  return image;
}

}  // namespace

RgbImage read_rgb(const std::string& path) {
  switch (sniff(path)) {
    case FileKind::kPng: return read_png_rgb(path);
    case FileKind::kJpeg: return read_jpeg(path, false);
    default: throw format_error("unsupported image format: '" + path + "'");
  }
}

Size probe_size(const std::string& path) {
  switch (sniff(path)) {
    case FileKind::kPng: {
      PngReader reader(path);
      PngHeader header;
      if (!png_read_header(reader, header)) throw reader.failure();
      return {static_cast<int>(header.width), static_cast<int>(header.height)};
    }
    case FileKind::kJpeg: {
      RgbImage header = read_jpeg(path, true);
      return {header.width, header.height};
    }
    default: throw format_error("unsupported image format: '" + path + "'");
  }
}

bool is_indexed_png(const std::string& path) {
  if (sniff(path) != FileKind::kPng) return false;
  PngReader reader(path);
  PngHeader header;
  if (!png_read_header(reader, header)) throw reader.failure();
  return header.color_type == PNG_COLOR_TYPE_PALETTE;
}

void write_rgb_png(const std::string& path, const RgbImage& image) {
  PngWriter writer(path);
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    rows[y] = const_cast<png_bytep>(&image.pixels[static_cast<std::size_t>(y) * image.width * 3]);
  }
  if (!png_write_all(writer, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, nullptr, rows)) {
    throw writer.failure();
  }
}

IndexedImage read_indexed_png(const std::string& path) {
  if (sniff(path) != FileKind::kPng) throw format_error("'" + path + "' is not a PNG file");
  PngReader reader(path);
  PngHeader header;
  if (!png_read_header(reader, header)) throw reader.failure();
  if (header.color_type != PNG_COLOR_TYPE_PALETTE) {
    throw format_error("'" + path + "' is not an indexed PNG");
  }
  IndexedImage out;
  png_colorp plte = nullptr;
  int count = 0;
  png_get_PLTE(reader.png(), reader.info(), &plte, &count);
  for (int i = 0; i < count; ++i) out.palette.push_back({plte[i].red, plte[i].green, plte[i].blue});
  if (header.bit_depth < 8) png_set_packing(reader.png());
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  if (!png_read_rows_into(reader, buffer, rows, static_cast<int>(header.height))) {
    throw reader.failure();
  }
  out.indices = Raster<std::uint8_t>(static_cast<int>(header.width), static_cast<int>(header.height));
  for (png_uint_32 y = 0; y < header.height; ++y) {
    std::memcpy(&out.indices.data()[y * header.width], rows[y], header.width);
  }
  return out;
}

void write_indexed_png(const std::string& path, const Raster<std::uint8_t>& indices,
                       const std::vector<Rgb>& palette) {
  if (palette.empty() || palette.size() > 256) throw invalid_argument("palette must hold 1..256 colours");
  for (std::uint8_t index : indices.data()) {
    if (index >= palette.size()) throw invalid_argument("palette index out of range");
  }
  std::vector<png_color> plte;
  for (const Rgb& c : palette) plte.push_back({c[0], c[1], c[2]});
  PngWriter writer(path);
  std::vector<png_bytep> rows(static_cast<std::size_t>(indices.height()));
  for (int y = 0; y < indices.height(); ++y) {
    rows[y] = const_cast<png_bytep>(&indices.data()[static_cast<std::size_t>(y) * indices.width()]);
  }
  if (!png_write_all(writer, indices.width(), indices.height(), 8, PNG_COLOR_TYPE_PALETTE, &plte,
                     rows)) {
    throw writer.failure();
  }
}

Raster<std::uint16_t> read_gray16_png(const std::string& path) {
  PngReader reader(path);
  PngHeader header;
  if (!png_read_header(reader, header)) throw reader.failure();
  if (header.color_type != PNG_COLOR_TYPE_GRAY || header.bit_depth != 16) {
    throw format_error("'" + path + "' is not a 16-bit grayscale PNG");
  }
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  if (!png_read_rows_into(reader, buffer, rows, static_cast<int>(header.height))) {
    throw reader.failure();
  }
  Raster<std::uint16_t> out(static_cast<int>(header.width), static_cast<int>(header.height));
  for (png_uint_32 y = 0; y < header.height; ++y) {
    for (png_uint_32 x = 0; x < header.width; ++x) {
      out.at(static_cast<int>(x), static_cast<int>(y)) =
          static_cast<std::uint16_t>((rows[y][2 * x] << 8) | rows[y][2 * x + 1]);
    }
  }
  return out;
}

void write_gray16_png(const std::string& path, const Raster<std::uint16_t>& image) {
  // PNG samples are big-endian.
  std::vector<png_byte> bytes(image.data().size() * 2);
  for (std::size_t i = 0; i < image.data().size(); ++i) {
    bytes[2 * i] = static_cast<png_byte>(image.data()[i] >> 8);
    bytes[2 * i + 1] = static_cast<png_byte>(image.data()[i] & 0xFF);
  }
  PngWriter writer(path);
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y) {
    rows[y] = &bytes[static_cast<std::size_t>(y) * image.width() * 2];
  }
  if (!png_write_all(writer, image.width(), image.height(), 16, PNG_COLOR_TYPE_GRAY, nullptr, rows)) {
    throw writer.failure();
  }
}

}  // namespace weakseg
