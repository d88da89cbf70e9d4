// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "strobe/classifier.hpp"

namespace strobe {

/// Persistent classification cache: one checksummed JSON file per key
/// under a cache directory. Corrupt entries are treated as misses (with a
/// warning) and overwritten by the next put. Safe for concurrent use;
/// last write wins on identical keys.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<Classification> get(const std::string& key);
  void put(const std::string& key, const Classification& value);

  /// Cache key: SHA-256 over (canonical image bytes, backend id, wire
  /// protocol version).
  static std::string key_for(const Image& img, const std::string& backend_id);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
};

/// Memoizing wrapper: repeated sweeps over the same images hit the cache
/// and perform zero network calls.
class CachedBackend : public Backend {
 public:
  CachedBackend(Backend& inner, std::filesystem::path cache_dir)
      : inner_(inner), cache_(std::move(cache_dir)) {}

  Classification classify(const Image& img) override;
  std::string id() const override { return inner_.id(); }

 private:
  Backend& inner_;
  ResponseCache cache_;
};

}  // namespace strobe
