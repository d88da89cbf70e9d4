// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace strobe {

enum class Channel : int { red = 0, green = 1, blue = 2 };

const char* channel_name(Channel c);
Channel channel_from_name(const std::string& name);

/// 8-bit RGB raster. Row-major, three interleaved channels, every
/// intensity in [0, 255] by construction. Immutable by convention once
/// built; all operations return fresh images.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // width * height * 3 bytes

  Image() = default;
  Image(int w, int h);                               // zero-filled (black)
  Image(int w, int h, std::vector<std::uint8_t> d);  // validates size

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  std::size_t value_count() const { return pixel_count() * 3; }

  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * 3 + c;
  }
  std::uint8_t& at(int x, int y, int c) { return data[index(x, y, c)]; }
  std::uint8_t at(int x, int y, int c) const { return data[index(x, y, c)]; }

  bool same_shape(const Image& other) const {
    return width == other.width && height == other.height;
  }

  bool operator==(const Image&) const = default;
};

/// Real-valued companion of Image with identical geometry. Values are
/// nominally in [0, 1]; they may leave that range between arithmetic and
/// the quantize step.
struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  FloatImage() = default;
  FloatImage(int w, int h);

  bool same_shape(const Image& other) const {
    return width == other.width && height == other.height;
  }
};

/// v -> v / 255 per coordinate.
FloatImage normalize(const Image& img);

/// v -> round(255 * clamp(v, 0, 1)). Rounds halves away from zero; this is
/// the one rounding rule used across the whole toolkit.
Image quantize(const FloatImage& fimg);

/// Nearest integer with halves away from zero, clamped to [0, 255].
std::uint8_t round_to_byte(double v);

}  // namespace strobe
