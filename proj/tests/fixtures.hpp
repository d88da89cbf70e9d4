// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "strobe/classifier.hpp"
#include "strobe/image.hpp"

namespace strobe::testing {

/// Unique scratch directory, removed recursively on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

Image constant_image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Independent uniform random value per coordinate.
Image random_image(int w, int h, std::uint64_t seed);

/// Smooth low-frequency field (sinusoid mixture per channel): the
/// "natural" fixture used by denoising and fusion sweeps.
Image smooth_image(int w, int h, std::uint64_t seed);

/// Per-pixel random colors: a maximally high-frequency fusion background.
Image textured_image(int w, int h, std::uint64_t seed);

/// Chromatically dominant texture with periods of roughly 16-40 pixels:
/// coarse enough to survive an 11x11 median, tinted strongly enough that
/// an alpha-blended foreground barely shifts its color statistics.
Image tinted_texture(int w, int h, std::uint64_t seed);

/// Base color plus iid per-channel jitter in [-25, 25].
Image color_class_image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b,
                        std::uint64_t seed);

/// Four-class synthetic color dataset. Classes are separable by color
/// histogram, by per-channel brightness and (for three of the four) by
/// luminance, which is what the training-stage defense experiments need.
struct ColorDataset {
  std::vector<LabeledImage> samples;
  std::vector<std::string> classes;
};
ColorDataset make_color_dataset(int per_class, std::uint64_t seed, int side = 224);

/// Write images as PNGs plus a manifest CSV; returns the manifest path.
std::filesystem::path write_dataset(const TempDir& dir, const std::string& manifest_name,
                                    const std::vector<LabeledImage>& samples);

}  // namespace strobe::testing
