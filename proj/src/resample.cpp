// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/resample.hpp"

#include <algorithm>
#include <cmath>

#include "strobe/errors.hpp"

namespace strobe {

Image resize_bilinear(const Image& img, int new_w, int new_h) {
  if (img.width < 1 || img.height < 1)
    throw InvalidParameter("cannot resize an empty image");
  if (new_w < 1 || new_h < 1)
    throw InvalidParameter("target dimensions must be positive");
  if (new_w == img.width && new_h == img.height) return img;

  Image out(new_w, new_h);
  const double sx_ratio = static_cast<double>(img.width) / new_w;
  const double sy_ratio = static_cast<double>(img.height) / new_h;

  for (int y = 0; y < new_h; ++y) {
    double sy = (y + 0.5) * sy_ratio - 0.5;
    sy = std::clamp(sy, 0.0, static_cast<double>(img.height - 1));
    int y0 = static_cast<int>(sy);
    int y1 = std::min(y0 + 1, img.height - 1);
    double fy = sy - y0;
    for (int x = 0; x < new_w; ++x) {
      double sx = (x + 0.5) * sx_ratio - 0.5;
      sx = std::clamp(sx, 0.0, static_cast<double>(img.width - 1));
      int x0 = static_cast<int>(sx);
      int x1 = std::min(x0 + 1, img.width - 1);
      double fx = sx - x0;
      for (int c = 0; c < 3; ++c) {
        double v = (1 - fy) * ((1 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c)) +
                   fy * ((1 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c));
        out.at(x, y, c) = round_to_byte(v);
      }
    }
  }
  return out;
}

Image crop(const Image& img, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > img.width || y0 + h > img.height)
    throw InvalidParameter("crop window out of bounds");
  Image out(w, h);
  for (int y = 0; y < h; ++y)
    std::copy_n(img.data.data() + img.index(x0, y0 + y, 0),
                static_cast<std::size_t>(w) * 3, out.data.data() + out.index(0, y, 0));
  return out;
}

Image hflip(const Image& img) {
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c)
        out.at(x, y, c) = img.at(img.width - 1 - x, y, c);
  return out;
}

Image clip_to_target(const Image& img, int target_w, int target_h) {
  if (img.width < 1 || img.height < 1)
    throw InvalidParameter("cannot clip an empty image");
  if (target_w < 1 || target_h < 1)
    throw InvalidParameter("target dimensions must be positive");

  const double scale = std::max(static_cast<double>(target_w) / img.width,
                                static_cast<double>(target_h) / img.height);
  int new_w = std::max(target_w, static_cast<int>(std::lround(img.width * scale)));
  int new_h = std::max(target_h, static_cast<int>(std::lround(img.height * scale)));
  Image resized = resize_bilinear(img, new_w, new_h);
  int ox = (new_w - target_w) / 2;
  int oy = (new_h - target_h) / 2;
  if (ox == 0 && oy == 0 && new_w == target_w && new_h == target_h) return resized;
  return crop(resized, ox, oy, target_w, target_h);
}

Image clip_to_standard(const Image& img, int size) {
  return clip_to_target(img, size, size);
}

}  // namespace strobe
