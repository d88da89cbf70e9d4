// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/remote.hpp"

#include <condition_variable>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "strobe/errors.hpp"
#include "strobe/wire.hpp"

namespace strobe {

// Counting gate for the per-endpoint in-flight bound.
struct RemoteBackend::Limiter {
  explicit Limiter(int slots) : available(slots) {}
  std::mutex mutex;
  std::condition_variable cv;
  int available;

  struct Slot {
    Limiter& limiter;
    explicit Slot(Limiter& l) : limiter(l) {
      std::unique_lock lock(limiter.mutex);
      limiter.cv.wait(lock, [&] { return limiter.available > 0; });
      --limiter.available;
    }
    ~Slot() {
      {
        std::lock_guard lock(limiter.mutex);
        ++limiter.available;
      }
      limiter.cv.notify_one();
    }
  };
};

RemoteBackend::RemoteBackend(std::string endpoint, RemoteOptions options)
    : endpoint_(std::move(endpoint)),
      options_(options),
      limiter_(std::make_unique<Limiter>(std::max(1, options.max_in_flight))) {}

RemoteBackend::~RemoteBackend() = default;

namespace {

Classification classify_once(const std::string& endpoint, const std::string& body,
                             const RemoteOptions& options) {
  httplib::Client client(endpoint);
  client.set_connection_timeout(options.timeout);
  client.set_read_timeout(options.timeout);
  auto res = client.Post(kClassifyPath, body, "application/json");
  if (!res) throw NetworkError("transport failure: " + httplib::to_string(res.error()));
  if (res->status >= 500)
    throw NetworkError("server error: HTTP " + std::to_string(res->status));
  if (res->status != 200)
    throw ProtocolError("unexpected HTTP status " + std::to_string(res->status));
  return parse_classify_response(res->body, endpoint);
}

}  // namespace

Classification RemoteBackend::classify(const Image& img) {
  Limiter::Slot slot(*limiter_);
  const std::string body = build_classify_request(img, options_.top_k);
  std::string last_error = "no attempts made";
  for (int attempt = 0; attempt < std::max(1, options_.attempts); ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(options_.base_backoff * (1 << (attempt - 1)));
    auto started = std::chrono::steady_clock::now();
    try {
      Classification cls = classify_once(endpoint_, body, options_);
      cls.latency_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
      return cls;
    } catch (const NetworkError& e) {
      last_error = e.what();  // retryable
    }
  }
  throw Unavailable("backend " + endpoint_ + " unavailable after " +
                    std::to_string(options_.attempts) + " attempts: " + last_error);
}

}  // namespace strobe
