// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "strobe/image_io.hpp"

using namespace strobe;
using namespace strobe::testing;

namespace {

int run_cli(const std::string& args, const std::filesystem::path& stdout_file = {}) {
  std::string cmd = std::string(STROBE_CLI_PATH) + " " + args;
  if (!stdout_file.empty()) cmd += " > " + stdout_file.string();
  cmd += " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli("definitely-not-a-verb") == 1);
  CHECK(run_cli("perturb") == 1);  // missing required options
}

TEST_CASE("data errors exit with code 2") {
  TempDir dir;
  CHECK(run_cli("metrics --a " + dir.file("nope.png").string() + " --b " +
                dir.file("nope.png").string()) == 2);
}

TEST_CASE("unreachable backends exit with code 3 under --strict") {
  TempDir dir;
  save_image(constant_image(32, 32, 9, 9, 9), dir.file("one.png"), ImageFormat::png);
  std::ofstream(dir.file("m.csv")) << "path,class,synonyms\none.png,thing,\n";
  CHECK(run_cli("sweep --manifest " + dir.file("m.csv").string() +
                " --backend http://127.0.0.1:9 --attacks gray --strict --out " +
                dir.file("out").string()) == 3);
}

TEST_CASE("perturb is seed-deterministic end to end") {
  TempDir dir;
  save_image(smooth_image(48, 48, 7), dir.file("in.png"), ImageFormat::png);

  auto args = [&](const std::string& out) {
    return "perturb --in " + dir.file("in.png").string() +
           " --attack saltpepper:amount=0.1 --seed 9 --out " + dir.file(out).string();
  };
  REQUIRE(run_cli(args("a.png")) == 0);
  REQUIRE(run_cli(args("b.png")) == 0);
  CHECK(load_image(dir.file("a.png")) == load_image(dir.file("b.png")));
  CHECK(load_image(dir.file("a.png")) != load_image(dir.file("in.png")));
}

TEST_CASE("metrics reports identical images as mse 0 / inf / ssim 1") {
  TempDir dir;
  save_image(smooth_image(32, 32, 8), dir.file("x.png"), ImageFormat::png);
  REQUIRE(run_cli("metrics --a " + dir.file("x.png").string() + " --b " +
                      dir.file("x.png").string(),
                  dir.file("out.json")) == 0);
  std::string out = slurp(dir.file("out.json"));
  CHECK(out.find("\"mse\":0.0") != std::string::npos);
  CHECK(out.find("\"psnr\":\"inf\"") != std::string::npos);
  CHECK(out.find("\"ssim\":1.0") != std::string::npos);
}

TEST_CASE("defend rejects monochrome input at the command line") {
  TempDir dir;
  Image mono = constant_image(32, 32, 0, 180, 0);
  save_image(mono, dir.file("mono.png"), ImageFormat::png);
  REQUIRE(run_cli("defend --in " + dir.file("mono.png").string() +
                      " --defense none,rejectmono --out " + dir.file("out.png").string(),
                  dir.file("msg.txt")) == 0);
  CHECK(slurp(dir.file("msg.txt")).find("rejected:single_channel(green)") !=
        std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir.file("out.png")));
}

TEST_CASE("train-ref then predict-ref round-trip on disk") {
  TempDir dir;
  ColorDataset data = make_color_dataset(2, 50, 64);
  auto manifest = write_dataset(dir, "train.csv", data.samples);

  REQUIRE(run_cli("train-ref --manifest " + manifest.string() + " --augment none --passes 1" +
                  " --clip 64 --seed 3 --out " + dir.file("model.json").string()) == 0);
  REQUIRE(std::filesystem::exists(dir.file("model.json")));

  save_image(data.samples[0].image, dir.file("probe.png"), ImageFormat::png);
  REQUIRE(run_cli("predict-ref --model " + dir.file("model.json").string() + " --in " +
                      dir.file("probe.png").string(),
                  dir.file("pred.json")) == 0);
  CHECK(slurp(dir.file("pred.json")).find(data.samples[0].class_name) != std::string::npos);
}
