// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

namespace strobe {

/// Fixture-driven classifier server speaking the classify wire protocol;
/// stands in for a cloud API in tests and offline sweeps.
///
/// The fixture maps image digests (SHA-256 of canonical image bytes) to
/// response specs:
///   {"labels": [...]}          -> 200 with that body
///   {"status": 503}            -> that HTTP status
///   {"raw": "..."}             -> 200 with the raw (possibly broken) body
/// "*" provides a default. Without a matching entry the server answers
/// with a deterministic synthetic label derived from the digest, so any
/// image stream gets reproducible responses.
///
/// GET /stats reports {"classify_calls": N} without bumping the counter.
class StubServer {
 public:
  StubServer();
  ~StubServer();

  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  void set_fixture(nlohmann::json mapping);
  void load_fixture_file(const std::filesystem::path& path);

  /// Bind and serve on a background thread; port 0 picks a free port.
  /// Returns the bound port.
  int start(int port = 0);
  void stop();

  /// Block until the server stops (foreground CLI mode).
  void wait();

  std::uint64_t classify_calls() const { return calls_.load(); }
  int port() const { return port_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  std::atomic<std::uint64_t> calls_{0};
  nlohmann::json fixture_;
  mutable std::mutex fixture_mutex_;
  int port_ = 0;
};

}  // namespace strobe
