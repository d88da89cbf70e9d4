// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/attacks.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "strobe/errors.hpp"
#include "strobe/image_io.hpp"
#include "strobe/metrics.hpp"
#include "strobe/resample.hpp"

namespace strobe {

namespace {

// canonical() -> parse() must be lossless; format_number guarantees it.
std::string format_param(double v) { return format_number(v); }

std::map<std::string, std::string> parse_params(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view item = text.substr(pos, comma == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : comma - pos);
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw InvalidParameter("malformed attack parameter: " + std::string(item));
    out.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double need_number(const std::map<std::string, std::string>& params,
                   const std::string& key, const char* attack) {
  auto it = params.find(key);
  if (it == params.end())
    throw InvalidParameter(std::string(attack) + " requires parameter " + key);
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw InvalidParameter("bad numeric value for " + key + ": " + it->second);
  }
}

}  // namespace

void AttackSpec::validate() const {
  switch (kind) {
    case AttackKind::gaussian_noise:
      if (var < 0) throw InvalidParameter("gaussian var must be >= 0");
      break;
    case AttackKind::salt_pepper:
      if (amount < 0 || amount > 1)
        throw InvalidParameter("saltpepper amount must be in [0, 1]");
      break;
    case AttackKind::rotation:
    case AttackKind::monochromatization:
    case AttackKind::grayscale:
      break;
    case AttackKind::image_fusion:
      if (alpha < 0 || alpha > 1)
        throw InvalidParameter("fusion alpha must be in [0, 1]");
      break;
  }
}

std::string AttackSpec::canonical() const {
  std::ostringstream out;
  switch (kind) {
    case AttackKind::gaussian_noise:
      out << "gaussian:";
      if (mean != 0.0) out << "mean=" << format_param(mean) << ",";
      out << "var=" << format_param(var);
      break;
    case AttackKind::salt_pepper:
      out << "saltpepper:amount=" << format_param(amount);
      break;
    case AttackKind::rotation:
      out << "rotate:degree=" << format_param(degree);
      break;
    case AttackKind::monochromatization:
      out << "mono:channel=" << channel_name(channel);
      break;
    case AttackKind::grayscale:
      out << "gray";
      break;
    case AttackKind::image_fusion:
      out << "fusion:alpha=" << format_param(alpha) << ",bg=" << background;
      break;
  }
  return out.str();
}

AttackSpec AttackSpec::parse(std::string_view text) {
  std::size_t colon = text.find(':');
  std::string name(text.substr(0, colon));
  std::string_view rest = colon == std::string_view::npos ? std::string_view{}
                                                          : text.substr(colon + 1);
  AttackSpec spec;
  if (name == "gray") {
    if (!rest.empty()) throw InvalidParameter("gray takes no parameters");
    spec.kind = AttackKind::grayscale;
    return spec;
  }
  if (name == "gaussian") {
    auto params = parse_params(rest);
    spec.kind = AttackKind::gaussian_noise;
    spec.var = need_number(params, "var", "gaussian");
    if (params.count("mean")) spec.mean = need_number(params, "mean", "gaussian");
  } else if (name == "saltpepper") {
    spec.kind = AttackKind::salt_pepper;
    spec.amount = need_number(parse_params(rest), "amount", "saltpepper");
  } else if (name == "rotate") {
    spec.kind = AttackKind::rotation;
    spec.degree = need_number(parse_params(rest), "degree", "rotate");
  } else if (name == "mono") {
    auto params = parse_params(rest);
    auto it = params.find("channel");
    if (it == params.end()) throw InvalidParameter("mono requires channel=");
    spec.kind = AttackKind::monochromatization;
    spec.channel = channel_from_name(it->second);
  } else if (name == "fusion") {
    // bg paths may contain '=' or ',', so split alpha off manually.
    spec.kind = AttackKind::image_fusion;
    std::size_t bg = rest.find("bg=");
    if (rest.rfind("alpha=", 0) != 0 || bg == std::string_view::npos)
      throw InvalidParameter("fusion spec must be fusion:alpha=<a>,bg=<path>");
    std::string alpha_text(rest.substr(6, rest.find(',') - 6));
    try {
      spec.alpha = std::stod(alpha_text);
    } catch (const std::exception&) {
      throw InvalidParameter("bad fusion alpha: " + alpha_text);
    }
    spec.background = std::string(rest.substr(bg + 3));
  } else {
    throw InvalidParameter("unknown attack: " + name);
  }
  spec.validate();
  return spec;
}

AttackGrid default_grid() {
  AttackGrid grid;
  for (double var : {0.05, 0.10, 0.15, 0.20}) {
    AttackSpec s;
    s.kind = AttackKind::gaussian_noise;
    s.var = var;
    grid.push_back(s);
  }
  for (double degree : {45.0, 90.0, 135.0, 180.0}) {
    AttackSpec s;
    s.kind = AttackKind::rotation;
    s.degree = degree;
    grid.push_back(s);
  }
  for (double amount : {0.01, 0.02, 0.03, 0.04}) {
    AttackSpec s;
    s.kind = AttackKind::salt_pepper;
    s.amount = amount;
    grid.push_back(s);
  }
  for (Channel c : {Channel::blue, Channel::green, Channel::red}) {
    AttackSpec s;
    s.kind = AttackKind::monochromatization;
    s.channel = c;
    grid.push_back(s);
  }
  AttackSpec gray;
  gray.kind = AttackKind::grayscale;
  grid.push_back(gray);
  return grid;
}

GaussianNoiseOutcome gaussian_noise_with_field(const Image& img, double mean,
                                               double var, Seed seed) {
  if (var < 0) throw InvalidParameter("gaussian var must be >= 0");
  Rng rng(seed);
  const double sigma = std::sqrt(var);
  FloatImage f = normalize(img);
  GaussianNoiseOutcome out;
  out.noise.resize(f.data.size());
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    out.noise[i] = rng.normal(mean, sigma);
    f.data[i] += out.noise[i];
  }
  out.image = quantize(f);
  return out;
}

Image gaussian_noise(const Image& img, double mean, double var, Seed seed) {
  return gaussian_noise_with_field(img, mean, var, seed).image;
}

SaltPepperOutcome salt_pepper_with_mask(const Image& img, double amount, Seed seed,
                                        ImpulseMode mode) {
  if (amount < 0 || amount > 1)
    throw InvalidParameter("saltpepper amount must be in [0, 1]");
  Rng rng(seed);
  SaltPepperOutcome out;
  out.image = img;
  out.mask.assign(img.data.size(), 0);
  if (mode == ImpulseMode::per_channel) {
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      double r = rng.uniform01();
      if (r < amount / 2) {
        out.image.data[i] = 0;
        out.mask[i] = 1;
      } else if (r < amount) {
        out.image.data[i] = 255;
        out.mask[i] = 2;
      }
    }
  } else {
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
      double r = rng.uniform01();
      std::uint8_t value, tag;
      if (r < amount / 2) {
        value = 0;
        tag = 1;
      } else if (r < amount) {
        value = 255;
        tag = 2;
      } else {
        continue;
      }
      for (int c = 0; c < 3; ++c) {
        out.image.data[p * 3 + c] = value;
        out.mask[p * 3 + c] = tag;
      }
    }
  }
  return out;
}

Image salt_pepper(const Image& img, double amount, Seed seed, ImpulseMode mode) {
  return salt_pepper_with_mask(img, amount, seed, mode).image;
}

namespace {

Image rotate_exact_180(const Image& img) {
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c)
        out.at(x, y, c) = img.at(img.width - 1 - x, img.height - 1 - y, c);
  return out;
}

Image rotate_exact_quarter(const Image& img, bool clockwise) {
  const int n = img.width;  // square by precondition
  Image out(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      for (int c = 0; c < 3; ++c)
        out.at(x, y, c) = clockwise ? img.at(y, n - 1 - x, c) : img.at(n - 1 - y, x, c);
  return out;
}

}  // namespace

Image rotate(const Image& img, double degree) {
  double deg = std::fmod(degree, 360.0);
  if (deg < 0) deg += 360.0;
  if (deg == 0.0) return img;
  if (deg == 180.0) return rotate_exact_180(img);
  const bool square = img.width == img.height;
  if (square && deg == 90.0) return rotate_exact_quarter(img, true);
  if (square && deg == 270.0) return rotate_exact_quarter(img, false);

  const double theta = deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta), s = std::sin(theta);
  const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
  Image out(img.width, img.height);

  auto sample = [&](double sx, double sy, int ch) -> double {
    int x0 = static_cast<int>(std::floor(sx));
    int y0 = static_cast<int>(std::floor(sy));
    double fx = sx - x0, fy = sy - y0;
    double acc = 0.0;
    for (int dy = 0; dy <= 1; ++dy)
      for (int dx = 0; dx <= 1; ++dx) {
        int xi = x0 + dx, yi = y0 + dy;
        if (xi < 0 || xi >= img.width || yi < 0 || yi >= img.height) continue;  // black fill
        double wgt = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy);
        acc += wgt * img.at(xi, yi, ch);
      }
    return acc;
  };

  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      // Inverse map: rotate the destination offset counterclockwise.
      double dx = x - cx, dy = y - cy;
      double sx = c * dx + s * dy + cx;
      double sy = -s * dx + c * dy + cy;
      for (int ch = 0; ch < 3; ++ch) out.at(x, y, ch) = round_to_byte(sample(sx, sy, ch));
    }
  return out;
}

Image monochromatize(const Image& img, Channel keep) {
  Image out(img.width, img.height);
  const int k = static_cast<int>(keep);
  for (std::size_t p = 0; p < img.pixel_count(); ++p)
    out.data[p * 3 + k] = img.data[p * 3 + k];
  return out;
}

Image grayscale(const Image& img) {
  Image out(img.width, img.height);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    double g = 0.299 * img.data[p * 3] + 0.587 * img.data[p * 3 + 1] +
               0.114 * img.data[p * 3 + 2];
    std::uint8_t v = round_to_byte(g);
    out.data[p * 3] = out.data[p * 3 + 1] = out.data[p * 3 + 2] = v;
  }
  return out;
}

Image image_fusion(const Image& original, const Image& background, double alpha) {
  if (alpha < 0 || alpha > 1) throw InvalidParameter("fusion alpha must be in [0, 1]");
  const Image* bg = &background;
  Image resized;
  if (!background.same_shape(original)) {
    resized = clip_to_target(background, original.width, original.height);
    bg = &resized;
  }
  Image out(original.width, original.height);
  for (std::size_t i = 0; i < original.data.size(); ++i)
    out.data[i] = round_to_byte(alpha * original.data[i] + (1.0 - alpha) * bg->data[i]);
  return out;
}

Image apply_attack(const AttackSpec& spec, const Image& img, Seed seed,
                   const std::map<std::string, Image>* backgrounds) {
  spec.validate();
  switch (spec.kind) {
    case AttackKind::gaussian_noise:
      return gaussian_noise(img, spec.mean, spec.var, seed);
    case AttackKind::salt_pepper:
      return salt_pepper(img, spec.amount, seed);
    case AttackKind::rotation:
      return rotate(img, spec.degree);
    case AttackKind::monochromatization:
      return monochromatize(img, spec.channel);
    case AttackKind::grayscale:
      return grayscale(img);
    case AttackKind::image_fusion: {
      if (backgrounds) {
        auto it = backgrounds->find(spec.background);
        if (it != backgrounds->end()) return image_fusion(img, it->second, spec.alpha);
      }
      return image_fusion(img, load_image(spec.background), spec.alpha);
    }
  }
  throw InvalidParameter("unhandled attack kind");
}

}  // namespace strobe
