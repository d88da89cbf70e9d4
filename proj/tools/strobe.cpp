// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.
//
// strobe — black-box robustness evaluation for image classifiers.
//
// Subcommands: perturb, metrics, sweep, defend, train-ref, predict-ref,
// stub-serve, plot-data. Exit codes: 0 ok, 1 usage, 2 data error,
// 3 backend unavailable.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "strobe/attacks.hpp"
#include "strobe/cache.hpp"
#include "strobe/classifier.hpp"
#include "strobe/defenses.hpp"
#include "strobe/errors.hpp"
#include "strobe/harness.hpp"
#include "strobe/image_io.hpp"
#include "strobe/metrics.hpp"
#include "strobe/remote.hpp"
#include "strobe/resample.hpp"
#include "strobe/stub_server.hpp"

namespace {

using namespace strobe;

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(sep, pos);
    std::string item = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (!item.empty()) out.push_back(item);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

// --backend accepts "ref:<model.json>" or an endpoint URL. The backend id
// (used in records and cache keys) is the argument verbatim.
std::unique_ptr<Backend> make_backend(const std::string& arg) {
  if (arg.rfind("ref:", 0) == 0) {
    const std::string path = arg.substr(4);
    std::ifstream in(path);
    if (!in) throw MissingFile("model file not found: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return std::make_unique<ReferenceBackend>(RefModel::from_json(text), arg);
  }
  return std::make_unique<RemoteBackend>(arg);
}

RefModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("model file not found: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return RefModel::from_json(text);
}

nlohmann::ordered_json classification_json(const Classification& cls, int top_k) {
  nlohmann::ordered_json out;
  auto arr = nlohmann::ordered_json::array();
  int emitted = 0;
  for (const auto& label : cls.labels) {
    if (top_k > 0 && emitted >= top_k) break;
    nlohmann::ordered_json item;
    item["name"] = label.name;
    item["confidence"] = label.confidence;
    arr.push_back(std::move(item));
    ++emitted;
  }
  out["backend"] = cls.backend_id;
  out["labels"] = std::move(arr);
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"black-box robustness evaluation toolkit for image classifiers"};
  app.require_subcommand(1);

  // --- perturb ---------------------------------------------------------
  std::string p_in, p_attack, p_out;
  std::uint64_t p_seed = 0;
  auto* perturb = app.add_subcommand("perturb", "apply one attack to one image");
  perturb->add_option("--in", p_in, "input image (png/ppm)")->required();
  perturb->add_option("--attack", p_attack, "attack spec, e.g. gaussian:var=0.05")->required();
  perturb->add_option("--out", p_out, "output image path")->required();
  perturb->add_option("--seed", p_seed, "seed for stochastic attacks");

  // --- metrics ---------------------------------------------------------
  std::string m_a, m_b;
  auto* metrics_cmd = app.add_subcommand("metrics", "quality report of two images");
  metrics_cmd->add_option("--a", m_a, "reference image")->required();
  metrics_cmd->add_option("--b", m_b, "comparison image")->required();

  // --- sweep -----------------------------------------------------------
  std::string s_manifest, s_backend, s_attacks, s_defense, s_out, s_cache;
  std::string s_format = "jsonl,csv";
  std::uint64_t s_seed = 0;
  int s_workers = 4;
  bool s_strict = false;
  auto* sweep = app.add_subcommand("sweep", "run an attack grid over a dataset");
  sweep->add_option("--manifest", s_manifest, "dataset manifest csv")->required();
  sweep->add_option("--backend", s_backend, "endpoint URL or ref:<model.json>")->required();
  sweep->add_option("--attacks", s_attacks,
                    "semicolon-separated attack specs (default: the standard 16-cell grid)");
  sweep->add_option("--defense", s_defense, "defense config, e.g. median:ksize=11,grayflag");
  sweep->add_option("--out", s_out, "output directory")->required();
  sweep->add_option("--format", s_format, "comma list of jsonl,csv (default both)");
  sweep->add_option("--seed", s_seed, "master seed");
  sweep->add_option("--cache-dir", s_cache, "response cache directory");
  sweep->add_option("--workers", s_workers, "parallel image evaluations");
  sweep->add_flag("--strict", s_strict, "abort on backend errors instead of annotating");

  // --- defend ----------------------------------------------------------
  std::string d_in, d_defense, d_out;
  auto* defend = app.add_subcommand("defend", "apply a defense config to one image");
  defend->add_option("--in", d_in, "input image")->required();
  defend->add_option("--defense", d_defense, "defense config")->required();
  defend->add_option("--out", d_out, "output image path (unused when rejected)")->required();

  // --- train-ref -------------------------------------------------------
  std::string t_manifest, t_out, t_augment = "default";
  int t_passes = 3;
  std::uint64_t t_seed = 0;
  int t_clip = 224;
  auto* train = app.add_subcommand("train-ref", "train the reference classifier");
  train->add_option("--manifest", t_manifest, "training manifest csv")->required();
  train->add_option("--out", t_out, "model output path")->required();
  train->add_option("--augment", t_augment, "default | none")
      ->check(CLI::IsMember({"default", "none"}));
  train->add_option("--passes", t_passes, "augmented passes per image");
  train->add_option("--seed", t_seed, "augmentation seed");
  train->add_option("--clip", t_clip, "input clip size");

  // --- predict-ref -----------------------------------------------------
  std::string r_model, r_in;
  int r_top_k = 5;
  auto* predict = app.add_subcommand("predict-ref", "classify with a reference model");
  predict->add_option("--model", r_model, "model json path")->required();
  predict->add_option("--in", r_in, "input image")->required();
  predict->add_option("--top-k", r_top_k, "labels to print");

  // --- stub-serve ------------------------------------------------------
  int v_port = 8080;
  std::string v_fixture;
  auto* serve = app.add_subcommand("stub-serve", "run the fixture classifier server");
  serve->add_option("--port", v_port, "listen port (0 picks a free one)");
  serve->add_option("--fixture", v_fixture, "digest->response fixture json");

  // --- plot-data -------------------------------------------------------
  std::string g_records, g_figure, g_out;
  auto* plot = app.add_subcommand("plot-data", "extract plot-ready series from a report");
  plot->add_option("--records", g_records, "records jsonl path")->required();
  plot->add_option("--figure", g_figure,
                   "escape_by_level | psnr_by_alpha | ssim_by_alpha | defense_by_ksize")
      ->required();
  plot->add_option("--out", g_out, "output csv path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (perturb->parsed()) {
    AttackSpec spec = AttackSpec::parse(p_attack);
    Image img = load_image(p_in);
    Image adv = apply_attack(spec, img, Seed{p_seed});
    save_image(adv, p_out, format_for_path(p_out));
    std::cout << "wrote " << p_out << "\n";
    return 0;
  }

  if (metrics_cmd->parsed()) {
    QualityReport q = quality(load_image(m_a), load_image(m_b));
    nlohmann::ordered_json out;
    out["mse"] = q.mse;
    if (std::isinf(q.psnr)) out["psnr"] = "inf";
    else out["psnr"] = q.psnr;
    out["ssim"] = q.ssim;
    out["psnr_typical"] = q.psnr_typical();
    out["ssim_good"] = q.ssim_good();
    out["ssim_mode"] = "channel-mean";
    std::cout << out.dump() << "\n";
    return 0;
  }

  if (sweep->parsed()) {
    DatasetManifest manifest = load_manifest(s_manifest);
    AttackGrid grid;
    if (s_attacks.empty()) {
      grid = default_grid();
    } else {
      for (const auto& text : split_list(s_attacks, ';'))
        grid.push_back(AttackSpec::parse(text));
    }
    SweepOptions options;
    options.seed = Seed{s_seed};
    options.workers = s_workers;
    options.strict = s_strict;
    if (!s_defense.empty()) options.defense = DefenseConfig::parse(s_defense);

    std::unique_ptr<Backend> backend = make_backend(s_backend);
    std::unique_ptr<CachedBackend> cached;
    Backend* active = backend.get();
    if (!s_cache.empty()) {
      cached = std::make_unique<CachedBackend>(*backend, s_cache);
      active = cached.get();
    }

    SweepResult result = run_attack_sweep(manifest, grid, *active, options);

    std::filesystem::create_directories(s_out);
    for (const auto& fmt : split_list(s_format, ',')) {
      if (fmt == "jsonl") emit_report_jsonl(result, std::filesystem::path(s_out) / "records.jsonl");
      else if (fmt == "csv") emit_report_csv(result, std::filesystem::path(s_out) / "aggregates.csv");
      else throw InvalidParameter("unknown format: " + fmt);
    }
    for (const auto& row : aggregate(result))
      std::cout << row.cell << ": records=" << row.records << " errors=" << row.errors
                << " escape=" << row.escape_rate << " defense=" << row.defense_rate << "\n";
    return 0;
  }

  if (defend->parsed()) {
    DefenseConfig cfg = DefenseConfig::parse(d_defense);
    PreprocessOutcome outcome = preprocess(load_image(d_in), cfg);
    if (outcome.rejected()) {
      std::cout << "rejected:" << outcome.rejection << "\n";
      return 0;
    }
    save_image(*outcome.image, d_out, format_for_path(d_out));
    std::cout << "wrote " << d_out << "\n";
    return 0;
  }

  if (train->parsed()) {
    DatasetManifest manifest = load_manifest(t_manifest);
    std::vector<LabeledImage> dataset;
    for (const auto& entry : manifest.entries)
      dataset.push_back({clip_to_standard(load_image(manifest.resolve(entry)), t_clip),
                         entry.class_name});
    AugmentConfig cfg = t_augment == "none" ? AugmentConfig::off(t_clip) : AugmentConfig{};
    cfg.crop_size = t_clip;
    RefModel model = train_reference(dataset, cfg, t_passes, Seed{t_seed});
    std::ofstream out(t_out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write model: " + t_out);
    out << model.to_json();
    std::cout << "trained " << model.classes.size() << " classes -> " << t_out << "\n";
    return 0;
  }

  if (predict->parsed()) {
    RefModel model = load_model_file(r_model);
    Classification cls = predict_reference(model, load_image(r_in));
    std::cout << classification_json(cls, r_top_k).dump() << "\n";
    return 0;
  }

  if (serve->parsed()) {
    StubServer server;
    if (!v_fixture.empty()) server.load_fixture_file(v_fixture);
    int port = server.start(v_port);
    std::cout << "stub classifier listening on 127.0.0.1:" << port << std::endl;
    server.wait();
    return 0;
  }

  if (plot->parsed()) {
    SweepResult result = load_report_jsonl(g_records);
    emit_plot_data(result, figure_from_name(g_figure), g_out);
    std::cout << "wrote " << g_out << "\n";
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Unavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NetworkError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
