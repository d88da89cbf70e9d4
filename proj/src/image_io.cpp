// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "strobe/errors.hpp"

namespace strobe {

namespace {

struct MemoryReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

extern "C" void png_mem_read(png_structp png, png_bytep out, png_size_t count) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->pos + count > reader->size)
    png_error(png, "read past end of buffer");
  std::memcpy(out, reader->data + reader->pos, count);
  reader->pos += count;
}

extern "C" void png_mem_write(png_structp png, png_bytep in, png_size_t count) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), in, in + count);
}

extern "C" void png_mem_flush(png_structp) {}

// libpng reports errors through longjmp; keep all C++ objects that need
// destruction outside the setjmp region.
class PngReadHandle {
 public:
  PngReadHandle() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
  }
  ~PngReadHandle() { png_destroy_read_struct(&png, &info, nullptr); }
  png_structp png = nullptr;
  png_infop info = nullptr;
};

class PngWriteHandle {
 public:
  PngWriteHandle() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
  }
  ~PngWriteHandle() { png_destroy_write_struct(&png, &info); }
  png_structp png = nullptr;
  png_infop info = nullptr;
};

bool looks_like_png(const std::uint8_t* bytes, std::size_t size) {
  return size >= 8 && png_sig_cmp(bytes, 0, 8) == 0;
}

bool looks_like_ppm(const std::uint8_t* bytes, std::size_t size) {
  return size >= 2 && bytes[0] == 'P' && bytes[1] == '6';
}

}  // namespace

Image decode_png(const std::uint8_t* bytes, std::size_t size) {
  if (!looks_like_png(bytes, size)) throw UnsupportedFormat("not a PNG stream");

  PngReadHandle h;
  if (!h.png || !h.info) throw IoError("libpng allocation failed");

  MemoryReader reader{bytes, size, 0};
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 w = 0, hgt = 0;

  if (setjmp(png_jmpbuf(h.png)))
    throw CorruptImage("PNG decode failed");

  png_set_read_fn(h.png, &reader, png_mem_read);
  png_read_info(h.png, h.info);

  int bit_depth = 0, color_type = 0;
  png_get_IHDR(h.png, h.info, &w, &hgt, &bit_depth, &color_type, nullptr, nullptr, nullptr);

  // Normalize every variant to 8-bit RGB: expand palettes and low-depth
  // gray, strip 16-bit down, promote gray, drop alpha.
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(h.png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(h.png);
  if (png_get_valid(h.png, h.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(h.png);
  if (bit_depth == 16) png_set_strip_16(h.png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(h.png);
  png_set_strip_alpha(h.png);
  png_read_update_info(h.png, h.info);

  if (png_get_rowbytes(h.png, h.info) != w * 3)
    throw CorruptImage("unexpected PNG row layout after normalization");

  pixels.resize(static_cast<std::size_t>(w) * hgt * 3);
  rows.resize(hgt);
  for (png_uint_32 y = 0; y < hgt; ++y)
    rows[y] = pixels.data() + static_cast<std::size_t>(y) * w * 3;
  png_read_image(h.png, rows.data());
  png_read_end(h.png, nullptr);

  return Image(static_cast<int>(w), static_cast<int>(hgt), std::move(pixels));
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  PngWriteHandle h;
  if (!h.png || !h.info) throw IoError("libpng allocation failed");

  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y)
    rows[y] = const_cast<std::uint8_t*>(img.data.data()) + img.index(0, y, 0);

  if (setjmp(png_jmpbuf(h.png)))
    throw IoError("PNG encode failed");

  png_set_write_fn(h.png, &out, png_mem_write, png_mem_flush);
  png_set_compression_level(h.png, 6);  // fixed so identical pixels encode identically
  png_set_IHDR(h.png, h.info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(h.png, h.info);
  png_write_image(h.png, rows.data());
  png_write_end(h.png, nullptr);
  return out;
}

namespace {

// Skips PPM whitespace and '#' comments, then parses a decimal field.
int ppm_int(const std::uint8_t* bytes, std::size_t size, std::size_t& pos) {
  while (pos < size) {
    if (std::isspace(bytes[pos])) {
      ++pos;
    } else if (bytes[pos] == '#') {
      while (pos < size && bytes[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  if (pos >= size || !std::isdigit(bytes[pos]))
    throw CorruptImage("malformed PPM header");
  long v = 0;
  while (pos < size && std::isdigit(bytes[pos])) {
    v = v * 10 + (bytes[pos] - '0');
    if (v > 1'000'000'000) throw CorruptImage("PPM header value out of range");
    ++pos;
  }
  return static_cast<int>(v);
}

}  // namespace

Image decode_ppm(const std::uint8_t* bytes, std::size_t size) {
  if (!looks_like_ppm(bytes, size)) throw UnsupportedFormat("not a P6 PPM stream");
  std::size_t pos = 2;
  int w = ppm_int(bytes, size, pos);
  int h = ppm_int(bytes, size, pos);
  int maxval = ppm_int(bytes, size, pos);
  if (maxval != 255) throw UnsupportedFormat("PPM maxval must be 255");
  if (pos >= size || !std::isspace(bytes[pos]))
    throw CorruptImage("missing separator before PPM payload");
  ++pos;  // exactly one whitespace byte before binary data

  std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (size - pos < need) throw CorruptImage("truncated PPM payload");
  std::vector<std::uint8_t> pixels(bytes + pos, bytes + pos + need);
  return Image(w, h, std::move(pixels));
}

std::vector<std::uint8_t> encode_ppm(const Image& img) {
  std::string header = "P6\n" + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data.begin(), img.data.end());
  return out;
}

Image load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path))
      throw FileNotFound("no such file: " + path.string());
    throw IoError("cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (looks_like_png(bytes.data(), bytes.size()))
    return decode_png(bytes.data(), bytes.size());
  if (looks_like_ppm(bytes.data(), bytes.size()))
    return decode_ppm(bytes.data(), bytes.size());
  throw UnsupportedFormat("unrecognized image format: " + path.string());
}

void save_image(const Image& img, const std::filesystem::path& path, ImageFormat format) {
  std::vector<std::uint8_t> bytes =
      format == ImageFormat::png ? encode_png(img) : encode_ppm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write: " + path.string());
}

ImageFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == ".png") return ImageFormat::png;
  if (ext == ".ppm") return ImageFormat::ppm;
  throw UnsupportedFormat("cannot infer format from extension: " + path.string());
}

}  // namespace strobe
