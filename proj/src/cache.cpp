// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/cache.hpp"

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "strobe/errors.hpp"
#include "strobe/wire.hpp"

namespace strobe {

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string ResponseCache::key_for(const Image& img, const std::string& backend_id) {
  auto bytes = canonical_image_bytes(img);
  bytes.push_back('|');
  bytes.insert(bytes.end(), backend_id.begin(), backend_id.end());
  bytes.push_back('|');
  const std::string version = kProtocolVersion;
  bytes.insert(bytes.end(), version.begin(), version.end());
  return sha256_hex(bytes.data(), bytes.size());
}

std::optional<Classification> ResponseCache::get(const std::string& key) {
  std::lock_guard lock(mutex_);
  const auto path = dir_ / (key + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  auto corrupt = [&](const char* why) -> std::optional<Classification> {
    std::cerr << "warning: cache entry " << key << " " << why << "; treating as miss\n";
    return std::nullopt;
  };

  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return corrupt("is not valid JSON");
  if (!doc.contains("checksum") || !doc.contains("payload")) return corrupt("is incomplete");
  const std::string payload = doc["payload"].dump();
  if (sha256_hex(payload) != doc["checksum"].get<std::string>())
    return corrupt("failed its checksum");

  try {
    Classification cls;
    cls.backend_id = doc["payload"].at("backend_id").get<std::string>();
    for (const auto& item : doc["payload"].at("labels"))
      cls.labels.push_back({item.at("name").get<std::string>(),
                            item.at("confidence").get<double>()});
    if (cls.labels.empty()) return corrupt("has no labels");
    return cls;
  } catch (const nlohmann::json::exception&) {
    return corrupt("has a malformed payload");
  }
}

void ResponseCache::put(const std::string& key, const Classification& value) {
  // Plain (key-sorted) JSON both here and in get(), so the checksum is
  // over one canonical serialization.
  nlohmann::json payload;
  payload["backend_id"] = value.backend_id;
  auto labels = nlohmann::json::array();
  for (const auto& label : value.labels) {
    nlohmann::json item;
    item["name"] = label.name;
    item["confidence"] = label.confidence;
    labels.push_back(std::move(item));
  }
  payload["labels"] = std::move(labels);

  nlohmann::json doc;
  const std::string payload_text = payload.dump();
  doc["checksum"] = sha256_hex(payload_text);
  doc["payload"] = nlohmann::json::parse(payload_text);

  std::lock_guard lock(mutex_);
  const auto path = dir_ / (key + ".json");
  const auto tmp = dir_ / (key + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write cache entry: " + tmp.string());
    out << doc.dump();
  }
  std::filesystem::rename(tmp, path);  // atomic on POSIX: last write wins
}

Classification CachedBackend::classify(const Image& img) {
  const std::string key = ResponseCache::key_for(img, inner_.id());
  if (auto hit = cache_.get(key)) return *hit;
  Classification fresh = inner_.classify(img);
  cache_.put(key, fresh);
  return fresh;
}

}  // namespace strobe
