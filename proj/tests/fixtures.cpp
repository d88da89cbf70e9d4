// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "fixtures.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "strobe/image_io.hpp"
#include "strobe/rng.hpp"

namespace strobe::testing {

TempDir::TempDir() {
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("strobe-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Image constant_image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Image img(w, h);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    img.data[p * 3] = r;
    img.data[p * 3 + 1] = g;
    img.data[p * 3 + 2] = b;
  }
  return img;
}

Image random_image(int w, int h, std::uint64_t seed) {
  Rng rng(Seed{seed});
  Image img(w, h);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.uniform_index(256));
  return img;
}

Image smooth_image(int w, int h, std::uint64_t seed) {
  Rng rng(Seed{seed});
  Image img(w, h);
  for (int c = 0; c < 3; ++c) {
    double f1x = rng.uniform(0.5, 2.0), f1y = rng.uniform(0.5, 2.0);
    double f2x = rng.uniform(1.0, 3.0), f2y = rng.uniform(1.0, 3.0);
    double p1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double p2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double u = static_cast<double>(x) / w, v = static_cast<double>(y) / h;
        double value = 128.0 +
                       60.0 * std::sin(2.0 * std::numbers::pi * (f1x * u + f1y * v) + p1) +
                       40.0 * std::sin(2.0 * std::numbers::pi * (f2x * u + f2y * v) + p2);
        img.at(x, y, c) = round_to_byte(value);
      }
  }
  return img;
}

Image textured_image(int w, int h, std::uint64_t seed) {
  return random_image(w, h, seed ^ 0x7e37edbull);
}

Image tinted_texture(int w, int h, std::uint64_t seed) {
  Rng rng(Seed{seed});
  Image img(w, h);
  const double tint[3] = {60.0, 150.0, 130.0};
  for (int c = 0; c < 3; ++c) {
    double f1x = rng.uniform(6.0, 10.0), f1y = rng.uniform(6.0, 10.0);
    double f2x = rng.uniform(10.0, 14.0), f2y = rng.uniform(10.0, 14.0);
    double p1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double p2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double u = static_cast<double>(x) / w, v = static_cast<double>(y) / h;
        double value = tint[c] +
                       45.0 * std::sin(2.0 * std::numbers::pi * (f1x * u + f1y * v) + p1) +
                       25.0 * std::sin(2.0 * std::numbers::pi * (f2x * u + f2y * v) + p2);
        img.at(x, y, c) = round_to_byte(value);
      }
  }
  return img;
}

Image color_class_image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b,
                        std::uint64_t seed) {
  Rng rng(Seed{seed});
  Image img(w, h);
  const double base[3] = {static_cast<double>(r), static_cast<double>(g),
                          static_cast<double>(b)};
  for (std::size_t p = 0; p < img.pixel_count(); ++p)
    for (int c = 0; c < 3; ++c)
      img.data[p * 3 + c] = round_to_byte(base[c] + rng.uniform(-25.0, 25.0));
  return img;
}

ColorDataset make_color_dataset(int per_class, std::uint64_t seed, int side) {
  // Base colors chosen so that (a) every class keeps its red or blue
  // channel solidly above one histogram bin, so green-only inputs carry
  // no class signal, and (b) each class's green level and its luminance
  // fall into the same gray bin; "plum" shares a green level with "rust"
  // and is only separable while color survives.
  struct ClassDef {
    const char* name;
    std::uint8_t r, g, b;
  };
  const ClassDef defs[] = {
      {"rust", 100, 40, 40},
      {"moss", 105, 140, 40},
      {"lime", 105, 255, 40},
      {"plum", 50, 40, 150},
  };
  ColorDataset out;
  for (const auto& def : defs) out.classes.push_back(def.name);
  for (int i = 0; i < per_class; ++i)
    for (const auto& def : defs)
      out.samples.push_back({color_class_image(side, side, def.r, def.g, def.b,
                                               derive_seed(Seed{seed},
                                                           std::string(def.name) + "/" +
                                                               std::to_string(i))
                                                   .value),
                             def.name});
  return out;
}

std::filesystem::path write_dataset(const TempDir& dir, const std::string& manifest_name,
                                    const std::vector<LabeledImage>& samples) {
  std::filesystem::path manifest = dir.file(manifest_name);
  std::ofstream csv(manifest);
  csv << "path,class,synonyms\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::string name = "img-" + std::to_string(i) + ".png";
    save_image(samples[i].image, dir.file(name), ImageFormat::png);
    csv << name << "," << samples[i].class_name << ",\n";
  }
  return manifest;
}

}  // namespace strobe::testing
