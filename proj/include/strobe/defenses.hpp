// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "strobe/image.hpp"
#include "strobe/rng.hpp"

namespace strobe {

enum class FilterKind { none, gauss, median };

/// Inference-time defense configuration.
///
/// Canonical text form: "<filter>[,grayflag][,rejectmono]" where filter is
/// `none`, `gauss:ksize=K` or `median:ksize=K`, e.g.
/// "median:ksize=11,grayflag,rejectmono".
struct DefenseConfig {
  FilterKind filter = FilterKind::none;
  int ksize = 3;
  bool grayscale_normalize = false;
  bool reject_monochrome = false;

  std::string canonical() const;
  static DefenseConfig parse(std::string_view text);
  bool operator==(const DefenseConfig&) const = default;
};

/// Separable Gaussian smoothing. Kernel width ksize (odd, >= 3) with
/// sigma = 0.3 * ((ksize - 1) / 2 - 1) + 0.8, normalized to sum 1;
/// reflected borders; output re-quantized with the global rounding rule.
Image gauss_filter(const Image& img, int ksize);

/// Order-statistic smoothing: each output value is the median of its
/// ksize x ksize neighborhood (per channel), replicated borders. Exact —
/// the median of an odd count of integers is an integer.
Image median_filter(const Image& img, int ksize);

enum class MonoVerdict { ok, single_channel, grayscale };

struct MonoReport {
  MonoVerdict verdict = MonoVerdict::ok;
  Channel channel = Channel::red;  // meaningful only for single_channel

  std::string describe() const;  // "ok" | "single_channel(red)" | "grayscale"
};

/// Flags images whose color content a monochromatization attack would
/// produce: exactly one channel carrying data, or R=G=B everywhere
/// (an all-black image counts as grayscale, not single-channel).
MonoReport detect_monochrome(const Image& img);

struct PreprocessOutcome {
  std::optional<Image> image;  // empty iff rejected
  std::string rejection;       // detector verdict when rejected

  bool rejected() const { return !image.has_value(); }
};

/// Full inference-time pipeline: monochrome check (reject or normalize to
/// grayscale per flags), then the configured filter.
PreprocessOutcome preprocess(const Image& img, const DefenseConfig& cfg);

/// Training-time augmentation parameters. The defaults are the standard
/// defense recipe: full-circle random rotation, 0.5 grayscale and flip
/// probabilities, 224 crop, and one of Gauss(29) / median(11) per sample.
struct AugmentConfig {
  std::pair<double, double> rotation_range{0.0, 360.0};
  double grayscale_prob = 0.5;
  double hflip_prob = 0.5;
  int crop_size = 224;
  std::vector<std::pair<FilterKind, int>> train_filters{
      {FilterKind::gauss, 29}, {FilterKind::median, 11}};

  /// Identity configuration (no augmentation at the input size).
  static AugmentConfig off(int crop_size = 224);
};

/// One augmented draw: random resize-and-crop to crop_size, horizontal
/// flip, rotation, grayscale, then one training filter (uniformly chosen)
/// — each step gated by its probability, all randomness from `seed`.
Image augment(const Image& img, const AugmentConfig& cfg, Seed seed);

}  // namespace strobe
