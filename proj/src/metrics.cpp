// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "strobe/errors.hpp"

namespace strobe {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

void require_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("image geometries differ");
}

std::array<double, kWindow> ssim_window() {
  std::array<double, kWindow> g{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    double d = i - (kWindow - 1) / 2.0;
    g[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += g[i];
  }
  for (auto& v : g) v /= sum;
  return g;
}

// Valid-region separable convolution with the SSIM window: horizontal
// pass shrinks width, vertical pass shrinks height.
std::vector<double> conv_valid(const std::vector<double>& in, int w, int h,
                               const std::array<double, kWindow>& g) {
  const int vw = w - kWindow + 1;
  const int vh = h - kWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(vw) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < vw; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * in[static_cast<std::size_t>(y) * w + x + k];
      tmp[static_cast<std::size_t>(y) * vw + x] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(vw) * vh);
  for (int y = 0; y < vh; ++y)
    for (int x = 0; x < vw; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * tmp[static_cast<std::size_t>(y + k) * vw + x];
      out[static_cast<std::size_t>(y) * vw + x] = s;
    }
  return out;
}

double ssim_channel(const Image& a, const Image& b, int c,
                    const std::array<double, kWindow>& g) {
  const int w = a.width, h = a.height;
  std::vector<double> x(static_cast<std::size_t>(w) * h), y(x.size()), xx(x.size()),
      yy(x.size()), xy(x.size());
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      std::size_t idx = static_cast<std::size_t>(j) * w + i;
      double va = a.at(i, j, c), vb = b.at(i, j, c);
      x[idx] = va;
      y[idx] = vb;
      xx[idx] = va * va;
      yy[idx] = vb * vb;
      xy[idx] = va * vb;
    }
  auto mu_x = conv_valid(x, w, h, g);
  auto mu_y = conv_valid(y, w, h, g);
  auto s_xx = conv_valid(xx, w, h, g);
  auto s_yy = conv_valid(yy, w, h, g);
  auto s_xy = conv_valid(xy, w, h, g);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    double mx = mu_x[i], my = mu_y[i];
    double vx = s_xx[i] - mx * mx;
    double vy = s_yy[i] - my * my;
    double cov = s_xy[i] - mx * my;
    total += ((2 * mx * my + kC1) * (2 * cov + kC2)) /
             ((mx * mx + my * my + kC1) * (vx + vy + kC2));
  }
  return total / static_cast<double>(mu_x.size());
}

}  // namespace

double mse(const Image& a, const Image& b) {
  require_same_shape(a, b);
  if (a.data.empty()) throw ShapeMismatch("empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(a.data.size());
}

double psnr(const Image& a, const Image& b) {
  double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b);
  if (std::min(a.width, a.height) < kWindow)
    throw ImageTooSmall("ssim needs at least an 11x11 image");
  const auto g = ssim_window();
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) sum += ssim_channel(a, b, c, g);
  return sum / 3.0;
}

QualityReport quality(const Image& a, const Image& b) {
  QualityReport r;
  r.mse = mse(a, b);
  r.psnr = r.mse == 0.0 ? std::numeric_limits<double>::infinity()
                        : 10.0 * std::log10(255.0 * 255.0 / r.mse);
  r.ssim = ssim(a, b);
  return r;
}

std::string format_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char full[40];
  std::snprintf(full, sizeof(full), "%.17g", v);
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::stod(shorter) == v) return shorter;
  }
  return full;
}

std::string psnr_to_string(double psnr_db) {
  if (std::isinf(psnr_db)) return "inf";
  return format_number(psnr_db);
}

double psnr_from_string(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  return std::stod(text);
}

double plot_psnr(double psnr_db) {
  return std::isinf(psnr_db) ? 40.0 : psnr_db;
}

}  // namespace strobe
