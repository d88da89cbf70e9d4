// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include "strobe/image.hpp"

namespace strobe {

/// Bilinear resize to exactly new_w x new_h, pixel centers aligned.
/// A same-size call is an exact copy.
Image resize_bilinear(const Image& img, int new_w, int new_h);

/// Copy the w x h window whose top-left corner is (x0, y0).
Image crop(const Image& img, int x0, int y0, int w, int h);

/// Mirror left-right.
Image hflip(const Image& img);

/// Scale uniformly so both sides cover the target, then center-crop.
/// With a square target this scales the shorter side to `size`.
Image clip_to_target(const Image& img, int target_w, int target_h);

/// Standard input normalization for every classification pipeline.
Image clip_to_standard(const Image& img, int size = 224);

}  // namespace strobe
