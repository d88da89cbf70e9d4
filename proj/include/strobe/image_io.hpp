// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "strobe/image.hpp"

namespace strobe {

enum class ImageFormat { png, ppm };

/// Decode a PNG or binary PPM (P6, maxval 255) file. PNG gray sources are
/// promoted to RGB, alpha is dropped. Anything else is rejected.
Image load_image(const std::filesystem::path& path);

/// Write `img` so that load_image reads back pixel-identical data.
void save_image(const Image& img, const std::filesystem::path& path, ImageFormat format);

/// Pick the format from a file extension (".png" / ".ppm").
ImageFormat format_for_path(const std::filesystem::path& path);

// In-memory PNG codec, used by the wire protocol as well as file I/O.
std::vector<std::uint8_t> encode_png(const Image& img);
Image decode_png(const std::uint8_t* bytes, std::size_t size);

std::vector<std::uint8_t> encode_ppm(const Image& img);
Image decode_ppm(const std::uint8_t* bytes, std::size_t size);

}  // namespace strobe
