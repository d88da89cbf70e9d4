// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "strobe/defenses.hpp"
#include "strobe/image.hpp"
#include "strobe/rng.hpp"

namespace strobe {

struct Label {
  std::string name;
  double confidence = 0.0;
};

/// Ranked classification result from any backend. Labels are sorted by
/// confidence, descending; top1() drives all statistics.
struct Classification {
  std::vector<Label> labels;
  std::string backend_id;
  double latency_ms = 0.0;

  const Label& top1() const { return labels.front(); }
};

/// Ground-truth matcher for one dataset class. Cloud vocabularies are
/// open-ended, so matching is case-insensitive substring over the class
/// name and its synonyms.
struct LabelMatcher {
  std::string class_name;
  std::vector<std::string> synonyms;
};

/// True iff the top-1 label matches the class: some candidate (class name
/// or synonym) is a case-insensitive substring of the top-1 name, or —
/// for one-word candidates — the top-1 name is a substring of it.
bool match(const LabelMatcher& matcher, const Classification& cls);

/// Classifier backend contract shared by the remote client, the cache
/// wrapper and the offline reference model.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual Classification classify(const Image& img) = 0;
  virtual std::string id() const = 0;
};

/// Canonical byte serialization of an image (geometry header + raw RGB);
/// the basis of cache keys and stub fixtures, independent of any
/// container format's encoder settings.
std::vector<std::uint8_t> canonical_image_bytes(const Image& img);

/// SHA-256 hex digest of the canonical bytes.
std::string image_digest(const Image& img);

std::string sha256_hex(const std::uint8_t* data, std::size_t size);
std::string sha256_hex(const std::string& text);

// ---------------------------------------------------------------------------
// Offline reference classifier: per-class centroids of a 4x4x4 normalized
// RGB color histogram. Deterministic, dependency-free, and genuinely
// sensitive to the attacks under evaluation (channel removal and noise
// reshape color histograms), which is all the defense experiments need.

constexpr int kHistogramBins = 64;  // 4 bins per channel

/// Normalized 4x4x4 RGB histogram; entries sum to 1.
std::array<double, kHistogramBins> color_histogram(const Image& img);

struct RefModel {
  std::vector<std::string> classes;
  std::vector<std::array<double, kHistogramBins>> centroids;  // one per class

  /// Versioned JSON document (stable field order, lossless doubles).
  std::string to_json() const;
  static RefModel from_json(const std::string& text);
};

struct LabeledImage {
  Image image;
  std::string class_name;
};

/// Per-class centroid of augmented-sample features; `passes` augmented
/// draws per training image. Deterministic given the seed.
RefModel train_reference(const std::vector<LabeledImage>& dataset,
                         const AugmentConfig& augment_cfg, int passes, Seed seed);

/// Confidence for class c = softmax(-distance(feature, centroid_c)).
/// Equidistant classes tie-break by class-list order.
Classification predict_reference(const RefModel& model, const Image& img,
                                 const std::string& backend_id = "ref");

class ReferenceBackend : public Backend {
 public:
  ReferenceBackend(RefModel model, std::string id = "ref")
      : model_(std::move(model)), id_(std::move(id)) {}
  Classification classify(const Image& img) override {
    return predict_reference(model_, img, id_);
  }
  std::string id() const override { return id_; }
  const RefModel& model() const { return model_; }

 private:
  RefModel model_;
  std::string id_;
};

}  // namespace strobe
