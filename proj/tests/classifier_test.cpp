// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <fstream>
#include <numeric>

#include "fixtures.hpp"
#include "strobe/attacks.hpp"
#include "strobe/cache.hpp"
#include "strobe/classifier.hpp"
#include "strobe/errors.hpp"
#include "strobe/image_io.hpp"
#include "strobe/remote.hpp"
#include "strobe/stub_server.hpp"
#include "strobe/wire.hpp"

using namespace strobe;
using namespace strobe::testing;

namespace {

Classification make_cls(std::vector<Label> labels) {
  Classification cls;
  cls.labels = std::move(labels);
  cls.backend_id = "test";
  return cls;
}

RemoteOptions fast_retries() {
  RemoteOptions opts;
  opts.base_backoff = std::chrono::milliseconds(10);
  return opts;
}

// Counts calls and replays a fixed answer; stands in for the network.
class CountingBackend : public Backend {
 public:
  explicit CountingBackend(std::string label) : label_(std::move(label)) {}
  Classification classify(const Image&) override {
    ++calls;
    return make_cls({{label_, 0.9}});
  }
  std::string id() const override { return "counting"; }
  int calls = 0;

 private:
  std::string label_;
};

}  // namespace

TEST_CASE("label matching rules") {
  LabelMatcher cat{"cat", {"kitten", "feline"}};
  CHECK(match(cat, make_cls({{"Egyptian cat", 0.8}})));
  CHECK(match(cat, make_cls({{"CAT", 0.8}})));
  CHECK_FALSE(match(cat, make_cls({{"dog", 0.8}})));
  // One-word synonyms also match when the top-1 is their substring.
  CHECK(match(cat, make_cls({{"cat", 0.9}, {"dog", 0.1}})));
  LabelMatcher tabby{"tabby cat", {"feline"}};
  CHECK(match(tabby, make_cls({{"feline", 0.7}})));
}

TEST_CASE("adding synonyms never un-matches") {
  LabelMatcher base{"cat", {}};
  Classification cls = make_cls({{"Persian cat", 0.9}});
  CHECK(match(base, cls));
  LabelMatcher wider = base;
  for (const char* extra : {"lion", "tiger", "kitten"}) {
    wider.synonyms.push_back(extra);
    CHECK(match(wider, cls));
  }
}

TEST_CASE("color histogram normalizes and localizes") {
  Image red = constant_image(16, 16, 255, 0, 0);
  auto hist = color_histogram(red);
  CHECK(std::accumulate(hist.begin(), hist.end(), 0.0) == doctest::Approx(1.0));
  CHECK(hist[3 * 16] == doctest::Approx(1.0));  // bin (3, 0, 0)

  auto spread = color_histogram(random_image(64, 64, 5));
  CHECK(std::accumulate(spread.begin(), spread.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("image digest is stable and content-sensitive") {
  Image a = random_image(16, 16, 1);
  CHECK(image_digest(a) == image_digest(a));
  CHECK(image_digest(a).size() == 64);
  Image b = a;
  b.data[0] ^= 1;
  CHECK(image_digest(a) != image_digest(b));
}

TEST_CASE("reference model separates constant color classes") {
  std::vector<LabeledImage> dataset;
  for (int i = 0; i < 3; ++i) {
    dataset.push_back({constant_image(32, 32, 220, 30, 30), "red-class"});
    dataset.push_back({constant_image(32, 32, 30, 30, 220), "blue-class"});
  }
  RefModel model = train_reference(dataset, AugmentConfig::off(32), 1, Seed{5});
  REQUIRE(model.classes.size() == 2);
  // Constant inputs put all histogram mass into one bin per class.
  CHECK(model.centroids[0][3 * 16] == doctest::Approx(1.0));
  CHECK(model.centroids[1][3] == doctest::Approx(1.0));

  Classification red = predict_reference(model, constant_image(32, 32, 230, 20, 20));
  CHECK(red.top1().name == "red-class");
  Classification blue = predict_reference(model, constant_image(32, 32, 20, 20, 230));
  CHECK(blue.top1().name == "blue-class");
}

TEST_CASE("training is deterministic per seed, sensitive to it with augmentation") {
  ColorDataset data = make_color_dataset(3, 900, 64);
  AugmentConfig cfg;
  cfg.crop_size = 64;
  cfg.train_filters = {{FilterKind::gauss, 9}};
  RefModel a = train_reference(data.samples, cfg, 2, Seed{42});
  RefModel b = train_reference(data.samples, cfg, 2, Seed{42});
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("grayscale-heavy augmentation concentrates centroids on the gray diagonal") {
  std::vector<LabeledImage> dataset;
  for (int i = 0; i < 4; ++i) {
    dataset.push_back({color_class_image(64, 64, 40, 40, 40, 100 + i), "dark"});
    dataset.push_back({color_class_image(64, 64, 210, 210, 210, 200 + i), "bright"});
  }
  AugmentConfig cfg = AugmentConfig::off(64);
  cfg.grayscale_prob = 1.0;
  RefModel model = train_reference(dataset, cfg, 1, Seed{7});

  // Gray pixels live on bins 21*b (b = intensity bin).
  for (std::size_t k = 0; k < model.classes.size(); ++k) {
    double diag = model.centroids[k][0] + model.centroids[k][21] + model.centroids[k][42] +
                  model.centroids[k][63];
    CHECK(diag == doctest::Approx(1.0));
  }

  Image gray_test = grayscale(color_class_image(64, 64, 50, 50, 50, 999));
  CHECK(predict_reference(model, gray_test).top1().name == "dark");
}

TEST_CASE("prediction confidences are a proper distribution") {
  std::vector<LabeledImage> dataset{
      {constant_image(16, 16, 255, 0, 0), "r"},
      {constant_image(16, 16, 0, 255, 0), "g"},
      {constant_image(16, 16, 0, 0, 255), "b"},
  };
  RefModel model = train_reference(dataset, AugmentConfig::off(16), 1, Seed{1});
  Classification cls = predict_reference(model, constant_image(16, 16, 255, 0, 0));
  double sum = 0.0;
  for (const auto& label : cls.labels) sum += label.confidence;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 1; i < cls.labels.size(); ++i)
    CHECK(cls.labels[i - 1].confidence >= cls.labels[i].confidence);
}

TEST_CASE("equidistant inputs tie-break by class order") {
  std::vector<LabeledImage> dataset{
      {constant_image(16, 16, 255, 0, 0), "first"},
      {constant_image(16, 16, 0, 0, 255), "second"},
  };
  RefModel model = train_reference(dataset, AugmentConfig::off(16), 1, Seed{1});
  // Green is orthogonal to both centroids, hence exactly equidistant.
  Classification cls = predict_reference(model, constant_image(16, 16, 0, 255, 0));
  CHECK(cls.labels[0].confidence == doctest::Approx(cls.labels[1].confidence).epsilon(1e-9));
  CHECK(cls.top1().name == "first");
}

TEST_CASE("model serialization round-trips and predicts identically") {
  ColorDataset data = make_color_dataset(2, 321, 32);
  RefModel model = train_reference(data.samples, AugmentConfig::off(32), 1, Seed{3});
  RefModel reloaded = RefModel::from_json(model.to_json());
  CHECK(reloaded.to_json() == model.to_json());

  Image probe = color_class_image(32, 32, 100, 40, 40, 555);
  CHECK(predict_reference(reloaded, probe).top1().name ==
        predict_reference(model, probe).top1().name);

  CHECK_THROWS_AS(RefModel::from_json("{}"), ParseError);
  CHECK_THROWS_AS(RefModel::from_json("not json"), ParseError);
}

TEST_CASE("prediction is invariant under image serialization round-trip") {
  TempDir dir;
  ColorDataset data = make_color_dataset(2, 77, 32);
  RefModel model = train_reference(data.samples, AugmentConfig::off(32), 1, Seed{4});
  Image probe = data.samples[0].image;
  save_image(probe, dir.file("probe.png"), ImageFormat::png);
  Image reloaded = load_image(dir.file("probe.png"));
  Classification direct = predict_reference(model, probe);
  Classification via_file = predict_reference(model, reloaded);
  CHECK(direct.top1().name == via_file.top1().name);
  CHECK(direct.top1().confidence == via_file.top1().confidence);
}

TEST_CASE("training requires two classes with data") {
  std::vector<LabeledImage> one{{constant_image(8, 8, 1, 2, 3), "only"}};
  CHECK_THROWS_AS(train_reference(one, AugmentConfig::off(8), 1, Seed{0}), InsufficientData);
}

TEST_CASE("base64 round-trips binary data") {
  std::vector<std::uint8_t> data;
  for (int i = 0; i < 999; ++i) data.push_back(static_cast<std::uint8_t>(i * 7));
  auto text = base64_encode(data.data(), data.size());
  CHECK(base64_decode(text) == data);
  CHECK_THROWS_AS(base64_decode("@@@@"), ProtocolError);
}

TEST_CASE("classify request envelope round-trips") {
  Image img = random_image(9, 5, 8);
  std::string body = build_classify_request(img, 3);
  ClassifyRequest req = parse_classify_request(body);
  CHECK(req.top_k == 3);
  CHECK(req.image == img);

  CHECK_THROWS_AS(parse_classify_request("{}"), ProtocolError);
  CHECK_THROWS_AS(parse_classify_request("garbage"), ProtocolError);
}

TEST_CASE("response parsing validates and re-sorts") {
  Classification cls = parse_classify_response(
      R"({"labels":[{"name":"b","confidence":0.2},{"name":"a","confidence":0.7}]})", "x");
  CHECK(cls.top1().name == "a");

  CHECK_THROWS_AS(parse_classify_response(R"({"labels":[]})", "x"), ProtocolError);
  CHECK_THROWS_AS(parse_classify_response(R"({"labels":[{"name":"a","confidence":1.2}]})", "x"),
                  ProtocolError);
  CHECK_THROWS_AS(parse_classify_response(R"({"labels":[{"name":"","confidence":0.5}]})", "x"),
                  ProtocolError);
  CHECK_THROWS_AS(parse_classify_response("hello not json", "x"), ProtocolError);
}

TEST_CASE("remote client against the stub server") {
  StubServer server;
  Image img = random_image(24, 24, 1);
  nlohmann::json fixture;
  fixture[image_digest(img)] = {
      {"labels", {{{"name", "tabby"}, {"confidence", 0.75}},
                  {{"name", "tiger cat"}, {"confidence", 0.85}}}}};
  server.set_fixture(fixture);
  server.start();

  RemoteBackend backend(server.url(), fast_retries());
  Classification cls = backend.classify(img);
  REQUIRE(cls.labels.size() == 2);
  CHECK(cls.top1().name == "tiger cat");  // client re-sorts descending
  CHECK(cls.backend_id == server.url());
  CHECK(server.classify_calls() == 1);
  server.stop();
}

TEST_CASE("stub server loads fixtures from disk") {
  TempDir dir;
  Image img = random_image(16, 16, 5);
  nlohmann::json fixture;
  fixture[image_digest(img)] = {{"labels", {{{"name", "heron"}, {"confidence", 0.6}}}}};
  std::ofstream(dir.file("fixture.json")) << fixture.dump();

  StubServer server;
  server.load_fixture_file(dir.file("fixture.json"));
  server.start();
  RemoteBackend backend(server.url(), fast_retries());
  CHECK(backend.classify(img).top1().name == "heron");
  server.stop();

  StubServer other;
  CHECK_THROWS_AS(other.load_fixture_file(dir.file("absent.json")), FileNotFound);
}

TEST_CASE("stub synthetic responses are digest-deterministic") {
  StubServer server;
  server.start();
  RemoteBackend backend(server.url(), fast_retries());
  Image img = random_image(16, 16, 77);
  Classification first = backend.classify(img);
  Classification second = backend.classify(img);
  CHECK(first.top1().name == second.top1().name);
  CHECK(first.top1().confidence == second.top1().confidence);
  CHECK(first.top1().name.rfind("stub-", 0) == 0);
  server.stop();
}

TEST_CASE("persistent 5xx exhausts retries into Unavailable") {
  StubServer server;
  nlohmann::json fixture;
  fixture["*"] = {{"status", 503}};
  server.set_fixture(fixture);
  server.start();

  RemoteBackend backend(server.url(), fast_retries());
  CHECK_THROWS_AS(backend.classify(random_image(8, 8, 2)), Unavailable);
  CHECK(server.classify_calls() == 3);  // the full retry budget
  server.stop();
}

TEST_CASE("malformed responses and 4xx raise ProtocolError without retry") {
  StubServer server;
  nlohmann::json fixture;
  fixture["*"] = {{"raw", "this is not json"}};
  server.set_fixture(fixture);
  server.start();
  RemoteBackend backend(server.url(), fast_retries());
  CHECK_THROWS_AS(backend.classify(random_image(8, 8, 3)), ProtocolError);
  CHECK(server.classify_calls() == 1);

  nlohmann::json teapot;
  teapot["*"] = {{"status", 404}};
  server.set_fixture(teapot);
  CHECK_THROWS_AS(backend.classify(random_image(8, 8, 4)), ProtocolError);
  server.stop();
}

TEST_CASE("response cache: hits, canonical keys and corruption recovery") {
  TempDir dir;
  ResponseCache cache(dir.path() / "cache");

  Image img = random_image(12, 12, 9);
  std::string key = ResponseCache::key_for(img, "backend-a");
  CHECK(key == ResponseCache::key_for(img, "backend-a"));
  CHECK(key != ResponseCache::key_for(img, "backend-b"));

  CHECK_FALSE(cache.get(key).has_value());
  cache.put(key, make_cls({{"tabby", 0.9}, {"dog", 0.1}}));
  auto hit = cache.get(key);
  REQUIRE(hit.has_value());
  CHECK(hit->top1().name == "tabby");
  CHECK(hit->labels.size() == 2);

  // Corrupt the entry on disk: the next get is a miss, not an error.
  std::ofstream(dir.path() / "cache" / (key + ".json")) << "{broken";
  CHECK_FALSE(cache.get(key).has_value());
}

TEST_CASE("cached backend performs one upstream call per unique image") {
  TempDir dir;
  CountingBackend upstream("egret");
  CachedBackend cached(upstream, dir.path() / "cache");

  Image img = random_image(10, 10, 4);
  CHECK(cached.classify(img).top1().name == "egret");
  CHECK(cached.classify(img).top1().name == "egret");
  CHECK(upstream.calls == 1);

  // PNG round-trip preserves canonical bytes, so it stays one entry.
  TempDir imgdir;
  save_image(img, imgdir.file("i.png"), ImageFormat::png);
  CHECK(cached.classify(load_image(imgdir.file("i.png"))).top1().name == "egret");
  CHECK(upstream.calls == 1);

  // A corrupted entry is re-fetched and overwritten.
  std::string key = ResponseCache::key_for(img, upstream.id());
  std::ofstream(dir.path() / "cache" / (key + ".json")) << "junk";
  CHECK(cached.classify(img).top1().name == "egret");
  CHECK(upstream.calls == 2);
  CHECK(cached.classify(img).top1().name == "egret");
  CHECK(upstream.calls == 2);
}
