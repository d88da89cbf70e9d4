// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/classifier.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <map>

#include <nlohmann/json.hpp>

#include "strobe/errors.hpp"

namespace strobe {

namespace {

std::string to_lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool one_word(const std::string& s) {
  return s.find(' ') == std::string::npos && !s.empty();
}

}  // namespace

bool match(const LabelMatcher& matcher, const Classification& cls) {
  if (cls.labels.empty()) return false;
  const std::string top1 = to_lower(cls.top1().name);
  std::vector<std::string> candidates;
  candidates.reserve(matcher.synonyms.size() + 1);
  candidates.push_back(to_lower(matcher.class_name));
  for (const auto& s : matcher.synonyms) candidates.push_back(to_lower(s));
  for (const auto& cand : candidates) {
    if (cand.empty()) continue;
    if (top1.find(cand) != std::string::npos) return true;
    if (one_word(cand) && cand.find(top1) != std::string::npos && !top1.empty()) return true;
  }
  return false;
}

std::vector<std::uint8_t> canonical_image_bytes(const Image& img) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + img.data.size());
  const char magic[] = "SBIMG1";
  out.insert(out.end(), magic, magic + 6);
  for (std::uint32_t v : {static_cast<std::uint32_t>(img.width),
                          static_cast<std::uint32_t>(img.height)}) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
  }
  out.insert(out.end(), img.data.begin(), img.data.end());
  return out;
}

std::string sha256_hex(const std::uint8_t* data, std::size_t size) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data, size, digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static const char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_hex(const std::string& text) {
  return sha256_hex(reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
}

std::string image_digest(const Image& img) {
  auto bytes = canonical_image_bytes(img);
  return sha256_hex(bytes.data(), bytes.size());
}

std::array<double, kHistogramBins> color_histogram(const Image& img) {
  std::array<std::uint64_t, kHistogramBins> counts{};
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    int r = img.data[p * 3] >> 6;
    int g = img.data[p * 3 + 1] >> 6;
    int b = img.data[p * 3 + 2] >> 6;
    ++counts[r * 16 + g * 4 + b];
  }
  std::array<double, kHistogramBins> hist{};
  const double total = static_cast<double>(img.pixel_count());
  if (total > 0)
    for (int i = 0; i < kHistogramBins; ++i) hist[i] = counts[i] / total;
  return hist;
}

std::string RefModel::to_json() const {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["feature"] = "rgb-histogram-4x4x4";
  doc["classes"] = classes;
  nlohmann::ordered_json cents = nlohmann::ordered_json::array();
  for (const auto& c : centroids) cents.push_back(std::vector<double>(c.begin(), c.end()));
  doc["centroids"] = std::move(cents);
  return doc.dump();
}

RefModel RefModel::from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("model document is not valid JSON");
  if (!doc.contains("version") || doc["version"] != 1)
    throw ParseError("unsupported model version");
  if (doc.value("feature", "") != std::string("rgb-histogram-4x4x4"))
    throw ParseError("unsupported model feature type");
  RefModel model;
  model.classes = doc.at("classes").get<std::vector<std::string>>();
  for (const auto& row : doc.at("centroids")) {
    auto vals = row.get<std::vector<double>>();
    if (vals.size() != kHistogramBins) throw ParseError("centroid has wrong dimension");
    std::array<double, kHistogramBins> c{};
    std::copy(vals.begin(), vals.end(), c.begin());
    model.centroids.push_back(c);
  }
  if (model.centroids.size() != model.classes.size())
    throw ParseError("class/centroid count mismatch");
  return model;
}

RefModel train_reference(const std::vector<LabeledImage>& dataset,
                         const AugmentConfig& augment_cfg, int passes, Seed seed) {
  if (passes < 1) throw InvalidParameter("passes must be >= 1");

  // Class list in first-appearance order; per-class feature accumulation.
  std::vector<std::string> classes;
  std::map<std::string, std::size_t> class_index;
  for (const auto& sample : dataset) {
    if (!class_index.count(sample.class_name)) {
      class_index[sample.class_name] = classes.size();
      classes.push_back(sample.class_name);
    }
  }
  if (classes.size() < 2) throw InsufficientData("need at least 2 classes");

  std::vector<std::array<double, kHistogramBins>> sums(classes.size());
  std::vector<std::uint64_t> counts(classes.size(), 0);
  for (auto& s : sums) s.fill(0.0);

  for (int pass = 0; pass < passes; ++pass) {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const auto& sample = dataset[i];
      Seed s = derive_seed(seed, sample.class_name + "#" + std::to_string(i) + "@" +
                                     std::to_string(pass));
      auto feature = color_histogram(augment(sample.image, augment_cfg, s));
      std::size_t k = class_index[sample.class_name];
      for (int j = 0; j < kHistogramBins; ++j) sums[k][j] += feature[j];
      ++counts[k];
    }
  }

  RefModel model;
  model.classes = classes;
  model.centroids.resize(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (counts[k] == 0) throw InsufficientData("class has no samples: " + classes[k]);
    for (int j = 0; j < kHistogramBins; ++j)
      model.centroids[k][j] = sums[k][j] / static_cast<double>(counts[k]);
  }
  return model;
}

Classification predict_reference(const RefModel& model, const Image& img,
                                 const std::string& backend_id) {
  if (model.classes.empty()) throw InsufficientData("empty model");
  auto feature = color_histogram(img);

  std::vector<double> neg_dist(model.classes.size());
  for (std::size_t k = 0; k < model.classes.size(); ++k) {
    double d2 = 0.0;
    for (int j = 0; j < kHistogramBins; ++j) {
      double d = feature[j] - model.centroids[k][j];
      d2 += d * d;
    }
    neg_dist[k] = -std::sqrt(d2);
  }
  const double m = *std::max_element(neg_dist.begin(), neg_dist.end());
  double z = 0.0;
  for (double v : neg_dist) z += std::exp(v - m);

  Classification cls;
  cls.backend_id = backend_id;
  for (std::size_t k = 0; k < model.classes.size(); ++k)
    cls.labels.push_back({model.classes[k], std::exp(neg_dist[k] - m) / z});
  std::stable_sort(cls.labels.begin(), cls.labels.end(),
                   [](const Label& a, const Label& b) { return a.confidence > b.confidence; });
  return cls;
}

}  // namespace strobe
