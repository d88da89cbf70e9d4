// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strobe/classifier.hpp"
#include "strobe/image.hpp"

namespace strobe {

// Wire protocol, version 1:
//   POST /v1/classify
//   request  {"image_b64": <base64 PNG bytes>, "top_k": <int>}
//   response 200 {"labels": [{"name": <string>, "confidence": <0..1>}, ...]}
// Anything else (non-200, invalid JSON, out-of-range confidence, empty
// label list) is a protocol violation.

inline constexpr const char* kClassifyPath = "/v1/classify";
inline constexpr const char* kProtocolVersion = "1";

std::string base64_encode(const std::uint8_t* data, std::size_t size);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// Request envelope for one image.
std::string build_classify_request(const Image& img, int top_k);

/// Parse the request body; throws ProtocolError on malformed envelopes.
struct ClassifyRequest {
  Image image;
  int top_k = 0;
};
ClassifyRequest parse_classify_request(const std::string& body);

/// Validate and normalize a response body: labels re-sorted descending,
/// confidences checked against [0, 1]. Throws ProtocolError.
Classification parse_classify_response(const std::string& body,
                                       const std::string& backend_id);

/// Serialize a label list into the response body.
std::string build_classify_response(const std::vector<Label>& labels);

}  // namespace strobe
