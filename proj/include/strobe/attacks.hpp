// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "strobe/image.hpp"
#include "strobe/rng.hpp"

namespace strobe {

enum class AttackKind {
  gaussian_noise,
  salt_pepper,
  rotation,
  monochromatization,
  grayscale,
  image_fusion,
};

/// One attack grid cell: the attack family plus its parameters.
///
/// Canonical text form (used by the CLI and reports):
///   gaussian:var=0.05        (mean included only when nonzero)
///   saltpepper:amount=0.01
///   rotate:degree=45
///   mono:channel=red
///   gray
///   fusion:alpha=0.2,bg=<path>
struct AttackSpec {
  AttackKind kind = AttackKind::grayscale;
  double mean = 0.0;              // gaussian_noise
  double var = 0.0;               // gaussian_noise
  double amount = 0.0;            // salt_pepper
  double degree = 0.0;            // rotation
  Channel channel = Channel::red; // monochromatization
  double alpha = 0.0;             // image_fusion
  std::string background;         // image_fusion background path

  void validate() const;  // throws InvalidParameter on out-of-range params
  std::string canonical() const;
  static AttackSpec parse(std::string_view text);

  bool operator==(const AttackSpec&) const = default;
};

using AttackGrid = std::vector<AttackSpec>;

/// The standard 16-cell evaluation grid: four families, four levels each.
AttackGrid default_grid();

/// Additive Gaussian noise in the normalized [0,1] domain. `var` is the
/// noise variance (sigma = sqrt(var)); one independent draw per (row,
/// col, channel); clipping happens once, after the addition.
Image gaussian_noise(const Image& img, double mean, double var, Seed seed);

/// Same, but also returns the pre-clip noise field in draw order.
struct GaussianNoiseOutcome {
  Image image;
  std::vector<double> noise;  // one entry per coordinate
};
GaussianNoiseOutcome gaussian_noise_with_field(const Image& img, double mean,
                                               double var, Seed seed);

/// Impulse noise. per_channel corrupts each (row, col, channel)
/// coordinate independently (the default); per_pixel corrupts whole
/// pixels at once.
enum class ImpulseMode { per_channel, per_pixel };

Image salt_pepper(const Image& img, double amount, Seed seed,
                  ImpulseMode mode = ImpulseMode::per_channel);

struct SaltPepperOutcome {
  Image image;
  std::vector<std::uint8_t> mask;  // per coordinate: 0 kept, 1 pepper, 2 salt
};
SaltPepperOutcome salt_pepper_with_mask(const Image& img, double amount, Seed seed,
                                        ImpulseMode mode = ImpulseMode::per_channel);

/// Clockwise rotation about the image center on the same canvas, black
/// fill outside the source. Bilinear sampling, except that right-angle
/// rotations of square images (and any 0/180) are exact permutations.
Image rotate(const Image& img, double degree);

/// Keep one channel, zero the other two.
Image monochromatize(const Image& img, Channel keep);

/// Luma conversion g = round(0.299 R + 0.587 G + 0.114 B), replicated to
/// all three channels.
Image grayscale(const Image& img);

/// Alpha blend: per coordinate round(alpha * original + (1-alpha) *
/// background), 8-bit domain. A background with different geometry is
/// first clipped to the original's geometry.
Image image_fusion(const Image& original, const Image& background, double alpha);

/// Run one grid cell. Fusion backgrounds resolve through `backgrounds`
/// (keyed by the spec's path) when provided, else from disk.
Image apply_attack(const AttackSpec& spec, const Image& img, Seed seed,
                   const std::map<std::string, Image>* backgrounds = nullptr);

}  // namespace strobe
