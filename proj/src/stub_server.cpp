// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/stub_server.hpp"

#include <fstream>

#include <httplib.h>

#include "strobe/classifier.hpp"
#include "strobe/errors.hpp"
#include "strobe/wire.hpp"

namespace strobe {

struct StubServer::Impl {
  httplib::Server server;
};

StubServer::StubServer() : impl_(std::make_unique<Impl>()) {}

StubServer::~StubServer() { stop(); }

void StubServer::set_fixture(nlohmann::json mapping) {
  std::lock_guard lock(fixture_mutex_);
  fixture_ = std::move(mapping);
}

void StubServer::load_fixture_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("fixture file not found: " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw ParseError("fixture file is not a JSON object: " + path.string());
  set_fixture(std::move(doc));
}

namespace {

// Deterministic fallback: a stable pseudo-label derived from the digest,
// so unfixtured images still classify reproducibly.
std::string synthetic_response(const std::string& digest) {
  const int byte = std::stoi(digest.substr(8, 2), nullptr, 16);
  const double top = 0.5 + byte / 255.0 * 0.49;
  std::vector<Label> labels{{"stub-" + digest.substr(0, 8), top},
                            {"stub-alt-" + digest.substr(2, 8), (1.0 - top) / 2.0}};
  return build_classify_response(labels);
}

}  // namespace

int StubServer::start(int port) {
  auto& server = impl_->server;

  server.Post(kClassifyPath, [this](const httplib::Request& req, httplib::Response& res) {
    calls_.fetch_add(1);
    std::string digest;
    try {
      ClassifyRequest parsed = parse_classify_request(req.body);
      digest = image_digest(parsed.image);
    } catch (const Error& e) {
      res.status = 400;
      res.set_content(std::string("{\"error\":\"") + e.what() + "\"}", "application/json");
      return;
    }

    nlohmann::json entry;
    {
      std::lock_guard lock(fixture_mutex_);
      if (fixture_.contains(digest)) entry = fixture_[digest];
      else if (fixture_.contains("*")) entry = fixture_["*"];
    }

    if (entry.is_null()) {
      res.set_content(synthetic_response(digest), "application/json");
      return;
    }
    if (entry.contains("status")) {
      res.status = entry["status"].get<int>();
      res.set_content(entry.value("body", std::string("{}")), "application/json");
      return;
    }
    if (entry.contains("raw")) {
      res.set_content(entry["raw"].get<std::string>(), "application/json");
      return;
    }
    res.set_content(entry.dump(), "application/json");
  });

  server.Get("/stats", [this](const httplib::Request&, httplib::Response& res) {
    nlohmann::json stats;
    stats["classify_calls"] = calls_.load();
    res.set_content(stats.dump(), "application/json");
  });

  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });

  if (port == 0) {
    port_ = server.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw IoError("stub server could not bind a port");
  } else {
    if (!server.bind_to_port("127.0.0.1", port))
      throw IoError("stub server could not bind port " + std::to_string(port));
    port_ = port;
  }
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  server.wait_until_ready();
  return port_;
}

void StubServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

void StubServer::wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace strobe
