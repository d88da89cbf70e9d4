// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <string>

#include "strobe/image.hpp"

namespace strobe {

/// Quality metrics of an adversarial image against its original.
/// mse == 0, psnr == +inf and ssim == 1 exactly when the images are
/// identical. psnr stays +inf in storage; the 40 dB display cap applies
/// only when plot series are emitted.
struct QualityReport {
  double mse = 0.0;
  double psnr = 0.0;  // dB, +inf for identical images
  double ssim = 0.0;

  /// PSNR lies in the 20-40 dB band typical of mild distortions.
  bool psnr_typical() const { return psnr >= 20.0 && psnr <= 40.0; }
  /// SSIM in (0.5, 1.0] reads as "still similar".
  bool ssim_good() const { return ssim > 0.5 && ssim <= 1.0; }
};

/// Mean square error over all coordinates, 8-bit domain.
double mse(const Image& a, const Image& b);

/// 10 * log10(255^2 / MSE); +inf when MSE is zero.
double psnr(const Image& a, const Image& b);

/// Structural similarity: per channel, 11x11 Gaussian window (sigma 1.5),
/// C1 = (0.01*255)^2, C2 = (0.03*255)^2, averaged over all fully interior
/// window positions, then over the three channels.
double ssim(const Image& a, const Image& b);

/// All three metrics in one pass.
QualityReport quality(const Image& a, const Image& b);

/// Shortest decimal form that parses back to the same double; integral
/// values print without a fraction. Used by every text serialization.
std::string format_number(double v);

/// Serialized PSNR field: decimal digits, or the literal token "inf".
std::string psnr_to_string(double psnr_db);
double psnr_from_string(const std::string& text);

/// Display convention for plot series only: +inf becomes 40.
double plot_psnr(double psnr_db);

}  // namespace strobe
