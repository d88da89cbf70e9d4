// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/defenses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <sstream>
#include <string>

#include "strobe/attacks.hpp"
#include "strobe/errors.hpp"
#include "strobe/resample.hpp"

namespace strobe {

namespace {

void check_ksize(int ksize, const Image& img) {
  if (ksize < 3 || ksize % 2 == 0)
    throw InvalidParameter("filter ksize must be an odd integer >= 3");
  if (ksize > std::min(img.width, img.height))
    throw InvalidParameter("filter ksize exceeds image side");
}

// Mirror an index into [0, n): -1 -> 0, -2 -> 1, n -> n-1 ("abc|cba").
int reflect_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

std::vector<double> gauss_kernel(int ksize) {
  const double sigma = 0.3 * ((ksize - 1) / 2.0 - 1.0) + 0.8;
  std::vector<double> k(ksize);
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    double d = i - (ksize - 1) / 2.0;
    k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

}  // namespace

Image gauss_filter(const Image& img, int ksize) {
  check_ksize(ksize, img);
  const auto kernel = gauss_kernel(ksize);
  const int r = ksize / 2;
  const int w = img.width, h = img.height;

  Image out(w, h);
  std::vector<double> plane(static_cast<std::size_t>(w) * h);
  std::vector<double> horiz(plane.size());
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        plane[static_cast<std::size_t>(y) * w + x] = img.at(x, y, c);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int k = -r; k <= r; ++k)
          s += kernel[k + r] * plane[static_cast<std::size_t>(y) * w + reflect_index(x + k, w)];
        horiz[static_cast<std::size_t>(y) * w + x] = s;
      }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int k = -r; k <= r; ++k)
          s += kernel[k + r] * horiz[static_cast<std::size_t>(reflect_index(y + k, h)) * w + x];
        out.at(x, y, c) = round_to_byte(s);
      }
  }
  return out;
}

Image median_filter(const Image& img, int ksize) {
  check_ksize(ksize, img);
  const int r = ksize / 2;
  const int w = img.width, h = img.height;
  const int pw = w + 2 * r, ph = h + 2 * r;
  const int rank = (ksize * ksize + 1) / 2;  // 1-based position of the median

  Image out(w, h);
  std::vector<std::uint8_t> padded(static_cast<std::size_t>(pw) * ph);
  for (int c = 0; c < 3; ++c) {
    // Replicate-pad once, then slide a 256-bin histogram along each row.
    for (int y = 0; y < ph; ++y) {
      int sy = std::clamp(y - r, 0, h - 1);
      for (int x = 0; x < pw; ++x)
        padded[static_cast<std::size_t>(y) * pw + x] =
            img.at(std::clamp(x - r, 0, w - 1), sy, c);
    }
    for (int y = 0; y < h; ++y) {
      std::array<int, 256> hist{};
      for (int wy = 0; wy < ksize; ++wy)
        for (int wx = 0; wx < ksize; ++wx)
          ++hist[padded[static_cast<std::size_t>(y + wy) * pw + wx]];
      for (int x = 0;; ++x) {
        int run = 0;
        int m = 0;
        while (run < rank) run += hist[m++];
        out.at(x, y, c) = static_cast<std::uint8_t>(m - 1);
        if (x + 1 >= w) break;
        for (int wy = 0; wy < ksize; ++wy) {
          --hist[padded[static_cast<std::size_t>(y + wy) * pw + x]];
          ++hist[padded[static_cast<std::size_t>(y + wy) * pw + x + ksize]];
        }
      }
    }
  }
  return out;
}

std::string MonoReport::describe() const {
  switch (verdict) {
    case MonoVerdict::ok: return "ok";
    case MonoVerdict::grayscale: return "grayscale";
    case MonoVerdict::single_channel:
      return std::string("single_channel(") + channel_name(channel) + ")";
  }
  return "?";
}

MonoReport detect_monochrome(const Image& img) {
  bool nonzero[3] = {false, false, false};
  bool all_equal = true;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    std::uint8_t r = img.data[p * 3], g = img.data[p * 3 + 1], b = img.data[p * 3 + 2];
    if (r) nonzero[0] = true;
    if (g) nonzero[1] = true;
    if (b) nonzero[2] = true;
    if (r != g || g != b) all_equal = false;
  }
  int carriers = nonzero[0] + nonzero[1] + nonzero[2];
  if (carriers == 1) {
    MonoReport rep;
    rep.verdict = MonoVerdict::single_channel;
    rep.channel = nonzero[0] ? Channel::red : (nonzero[1] ? Channel::green : Channel::blue);
    return rep;
  }
  if (all_equal) return MonoReport{MonoVerdict::grayscale, Channel::red};
  return MonoReport{MonoVerdict::ok, Channel::red};
}

PreprocessOutcome preprocess(const Image& img, const DefenseConfig& cfg) {
  if (cfg.filter != FilterKind::none) check_ksize(cfg.ksize, img);

  Image current = img;
  if (cfg.reject_monochrome || cfg.grayscale_normalize) {
    MonoReport rep = detect_monochrome(current);
    if (rep.verdict != MonoVerdict::ok) {
      if (cfg.reject_monochrome) return PreprocessOutcome{std::nullopt, rep.describe()};
      current = grayscale(current);  // normalize instead of rejecting
    }
  }
  switch (cfg.filter) {
    case FilterKind::none: break;
    case FilterKind::gauss: current = gauss_filter(current, cfg.ksize); break;
    case FilterKind::median: current = median_filter(current, cfg.ksize); break;
  }
  return PreprocessOutcome{std::move(current), {}};
}

std::string DefenseConfig::canonical() const {
  std::ostringstream out;
  switch (filter) {
    case FilterKind::none: out << "none"; break;
    case FilterKind::gauss: out << "gauss:ksize=" << ksize; break;
    case FilterKind::median: out << "median:ksize=" << ksize; break;
  }
  if (grayscale_normalize) out << ",grayflag";
  if (reject_monochrome) out << ",rejectmono";
  return out.str();
}

DefenseConfig DefenseConfig::parse(std::string_view text) {
  DefenseConfig cfg;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item(text.substr(pos, comma == std::string_view::npos
                                          ? std::string_view::npos
                                          : comma - pos));
    if (first) {
      first = false;
      if (item == "none") {
        cfg.filter = FilterKind::none;
      } else if (item.rfind("gauss:ksize=", 0) == 0 || item.rfind("median:ksize=", 0) == 0) {
        cfg.filter = item[0] == 'g' ? FilterKind::gauss : FilterKind::median;
        try {
          cfg.ksize = std::stoi(item.substr(item.find('=') + 1));
        } catch (const std::exception&) {
          throw InvalidParameter("bad defense ksize in: " + item);
        }
        if (cfg.ksize < 3 || cfg.ksize % 2 == 0)
          throw InvalidParameter("defense ksize must be an odd integer >= 3");
      } else {
        throw InvalidParameter("unknown defense filter: " + item);
      }
    } else if (item == "grayflag") {
      cfg.grayscale_normalize = true;
    } else if (item == "rejectmono") {
      cfg.reject_monochrome = true;
    } else {
      throw InvalidParameter("unknown defense flag: " + item);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cfg;
}

AugmentConfig AugmentConfig::off(int crop_size) {
  AugmentConfig cfg;
  cfg.rotation_range = {0.0, 0.0};
  cfg.grayscale_prob = 0.0;
  cfg.hflip_prob = 0.0;
  cfg.crop_size = crop_size;
  cfg.train_filters.clear();
  return cfg;
}

Image augment(const Image& img, const AugmentConfig& cfg, Seed seed) {
  if (cfg.crop_size < 1) throw InvalidParameter("crop_size must be >= 1");
  if (cfg.grayscale_prob < 0 || cfg.grayscale_prob > 1 || cfg.hflip_prob < 0 ||
      cfg.hflip_prob > 1)
    throw InvalidParameter("augment probabilities must be in [0, 1]");

  Rng rng(seed);
  Image current = img;

  // Random resize-and-crop: pick a square window between crop_size and the
  // short side, place it uniformly, then scale it to crop_size.
  if (std::min(current.width, current.height) < cfg.crop_size)
    current = clip_to_target(current, cfg.crop_size, cfg.crop_size);
  const int short_side = std::min(current.width, current.height);
  const int span = short_side - cfg.crop_size + 1;
  const int side = cfg.crop_size + static_cast<int>(rng.uniform_index(static_cast<std::uint32_t>(span)));
  const int x0 = static_cast<int>(rng.uniform_index(static_cast<std::uint32_t>(current.width - side + 1)));
  const int y0 = static_cast<int>(rng.uniform_index(static_cast<std::uint32_t>(current.height - side + 1)));
  current = crop(current, x0, y0, side, side);
  if (side != cfg.crop_size) current = resize_bilinear(current, cfg.crop_size, cfg.crop_size);

  if (rng.uniform01() < cfg.hflip_prob) current = hflip(current);

  double angle = rng.uniform(cfg.rotation_range.first, cfg.rotation_range.second);
  if (angle != 0.0) current = rotate(current, angle);

  if (rng.uniform01() < cfg.grayscale_prob) current = grayscale(current);

  if (!cfg.train_filters.empty()) {
    auto [kind, ksize] = cfg.train_filters[rng.uniform_index(
        static_cast<std::uint32_t>(cfg.train_filters.size()))];
    if (kind == FilterKind::gauss) current = gauss_filter(current, ksize);
    else if (kind == FilterKind::median) current = median_filter(current, ksize);
  }
  return current;
}

}  // namespace strobe
