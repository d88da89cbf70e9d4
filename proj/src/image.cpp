// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/image.hpp"

#include <cmath>

#include "strobe/errors.hpp"

namespace strobe {

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::red: return "red";
    case Channel::green: return "green";
    case Channel::blue: return "blue";
  }
  return "?";
}

Channel channel_from_name(const std::string& name) {
  if (name == "red") return Channel::red;
  if (name == "green") return Channel::green;
  if (name == "blue") return Channel::blue;
  throw InvalidParameter("unknown channel name: " + name);
}

Image::Image(int w, int h) : width(w), height(h) {
  if (w < 0 || h < 0) throw InvalidParameter("negative image dimensions");
  data.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

Image::Image(int w, int h, std::vector<std::uint8_t> d)
    : width(w), height(h), data(std::move(d)) {
  if (w < 0 || h < 0) throw InvalidParameter("negative image dimensions");
  if (data.size() != static_cast<std::size_t>(w) * h * 3)
    throw InvalidParameter("pixel buffer size does not match geometry");
}

FloatImage::FloatImage(int w, int h) : width(w), height(h) {
  if (w < 0 || h < 0) throw InvalidParameter("negative image dimensions");
  data.assign(static_cast<std::size_t>(w) * h * 3, 0.0);
}

FloatImage normalize(const Image& img) {
  FloatImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    out.data[i] = img.data[i] / 255.0;
  return out;
}

Image quantize(const FloatImage& fimg) {
  Image out(fimg.width, fimg.height);
  for (std::size_t i = 0; i < fimg.data.size(); ++i) {
    double v = fimg.data[i];
    v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    out.data[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
  }
  return out;
}

std::uint8_t round_to_byte(double v) {
  long r = std::lround(v);  // lround ties away from zero
  if (r < 0) r = 0;
  if (r > 255) r = 255;
  return static_cast<std::uint8_t>(r);
}

}  // namespace strobe
