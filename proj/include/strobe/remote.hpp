// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "strobe/classifier.hpp"

namespace strobe {

struct RemoteOptions {
  int attempts = 3;  // total tries per request
  std::chrono::milliseconds base_backoff{500};  // doubles per retry
  int max_in_flight = 4;  // bounded concurrent requests per endpoint
  int top_k = 5;
  std::chrono::seconds timeout{10};
};

/// HTTP client for the classify wire protocol. Retries transport errors
/// and 5xx responses with exponential backoff and throws Unavailable when
/// the budget runs out; malformed responses and 4xx throw ProtocolError
/// immediately.
class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(std::string endpoint, RemoteOptions options = {});
  ~RemoteBackend() override;

  Classification classify(const Image& img) override;
  std::string id() const override { return endpoint_; }

 private:
  std::string endpoint_;
  RemoteOptions options_;
  struct Limiter;
  std::unique_ptr<Limiter> limiter_;
};

}  // namespace strobe
