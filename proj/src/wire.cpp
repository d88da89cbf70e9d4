// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/wire.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "strobe/errors.hpp"
#include "strobe/image_io.hpp"

namespace strobe {

namespace {
constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::uint8_t* data, std::size_t size) {
  std::string out;
  out.reserve((size + 2) / 3 * 4);
  for (std::size_t i = 0; i < size; i += 3) {
    std::uint32_t chunk = data[i] << 16;
    if (i + 1 < size) chunk |= data[i + 1] << 8;
    if (i + 2 < size) chunk |= data[i + 2];
    out.push_back(kAlphabet[(chunk >> 18) & 0x3f]);
    out.push_back(kAlphabet[(chunk >> 12) & 0x3f]);
    out.push_back(i + 1 < size ? kAlphabet[(chunk >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < size ? kAlphabet[chunk & 0x3f] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<std::uint8_t> out;
  std::uint32_t buffer = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    int v = value_of(c);
    if (v < 0) throw ProtocolError("invalid base64 payload");
    buffer = (buffer << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((buffer >> bits) & 0xff));
    }
  }
  return out;
}

std::string build_classify_request(const Image& img, int top_k) {
  auto png = encode_png(img);
  nlohmann::ordered_json body;
  body["image_b64"] = base64_encode(png.data(), png.size());
  body["top_k"] = top_k;
  return body.dump();
}

ClassifyRequest parse_classify_request(const std::string& body) {
  nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw ProtocolError("request body is not a JSON object");
  if (!doc.contains("image_b64") || !doc["image_b64"].is_string())
    throw ProtocolError("request missing image_b64");
  ClassifyRequest req;
  req.top_k = doc.value("top_k", 1);
  if (req.top_k < 1) throw ProtocolError("top_k must be >= 1");
  auto bytes = base64_decode(doc["image_b64"].get<std::string>());
  try {
    req.image = decode_png(bytes.data(), bytes.size());
  } catch (const Error& e) {
    throw ProtocolError(std::string("request image is not decodable PNG: ") + e.what());
  }
  return req;
}

Classification parse_classify_response(const std::string& body,
                                       const std::string& backend_id) {
  nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw ProtocolError("response body is not a JSON object");
  if (!doc.contains("labels") || !doc["labels"].is_array() || doc["labels"].empty())
    throw ProtocolError("response has no labels");

  Classification cls;
  cls.backend_id = backend_id;
  for (const auto& item : doc["labels"]) {
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string() ||
        !item.contains("confidence") || !item["confidence"].is_number())
      throw ProtocolError("malformed label entry");
    Label label{item["name"].get<std::string>(), item["confidence"].get<double>()};
    if (label.name.empty()) throw ProtocolError("label name is empty");
    if (label.confidence < 0.0 || label.confidence > 1.0)
      throw ProtocolError("label confidence outside [0, 1]");
    cls.labels.push_back(std::move(label));
  }
  std::stable_sort(cls.labels.begin(), cls.labels.end(),
                   [](const Label& a, const Label& b) { return a.confidence > b.confidence; });
  return cls;
}

std::string build_classify_response(const std::vector<Label>& labels) {
  nlohmann::ordered_json body;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& label : labels) {
    nlohmann::ordered_json item;
    item["name"] = label.name;
    item["confidence"] = label.confidence;
    arr.push_back(std::move(item));
  }
  body["labels"] = std::move(arr);
  return body.dump();
}

}  // namespace strobe
