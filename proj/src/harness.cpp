// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "strobe/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "strobe/errors.hpp"
#include "strobe/image_io.hpp"
#include "strobe/resample.hpp"

namespace strobe {

const LabelMatcher& DatasetManifest::matcher_for(const std::string& class_name) const {
  auto it = matchers.find(class_name);
  if (it == matchers.end()) throw ParseError("no matcher for class: " + class_name);
  return it->second;
}

std::filesystem::path DatasetManifest::resolve(const ManifestEntry& entry) const {
  std::filesystem::path p(entry.path);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::string> DatasetManifest::class_list() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (std::find(out.begin(), out.end(), e.class_name) == out.end())
      out.push_back(e.class_name);
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw MissingFile("manifest not found: " + csv_path.string());

  DatasetManifest manifest;
  manifest.id = csv_path.stem().string();
  manifest.base_dir = csv_path.has_parent_path() ? csv_path.parent_path()
                                                 : std::filesystem::path(".");

  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "path,class,synonyms")
    throw ParseError("manifest must start with header 'path,class,synonyms'");

  std::set<std::string> seen_paths;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != 3)
      throw ParseError("manifest row " + std::to_string(row) + " needs 3 fields");
    const std::string& path = fields[0];
    const std::string& cls = fields[1];
    if (path.empty() || cls.empty())
      throw ParseError("manifest row " + std::to_string(row) + " has empty path or class");
    if (!seen_paths.insert(path).second)
      throw DuplicateEntry("duplicate manifest path at row " + std::to_string(row) + ": " + path);

    ManifestEntry entry{path, cls};
    if (!std::filesystem::exists(manifest.resolve(entry)))
      throw MissingFile("manifest row " + std::to_string(row) + " references missing file: " + path);
    manifest.entries.push_back(entry);

    auto& matcher = manifest.matchers[cls];
    matcher.class_name = cls;
    for (const auto& synonym : split(fields[2], '|'))
      if (!synonym.empty() &&
          std::find(matcher.synonyms.begin(), matcher.synonyms.end(), synonym) ==
              matcher.synonyms.end())
        matcher.synonyms.push_back(synonym);
  }
  if (manifest.entries.empty()) throw ParseError("manifest has no entries");
  return manifest;
}

namespace {

std::string error_token(const std::exception& e) {
  // Stable tokens keep reruns byte-identical even when messages vary.
  if (dynamic_cast<const Unavailable*>(&e)) return "error:unavailable";
  if (dynamic_cast<const ProtocolError*>(&e)) return "error:protocol";
  if (dynamic_cast<const NetworkError*>(&e)) return "error:network";
  if (dynamic_cast<const Error*>(&e)) return "error:data";
  return "error:internal";
}

struct EvalOutcome {
  bool correct = false;
  std::string top1;
  std::string status = "ok";
};

// Defense (when configured) -> classify -> match. Rejections score per
// the fixed rule: defended attack, failed baseline.
EvalOutcome evaluate(const Image& img, const std::optional<DefenseConfig>& defense,
                     Backend& backend, const LabelMatcher& matcher, bool is_baseline) {
  EvalOutcome out;
  const Image* input = &img;
  Image defended;
  if (defense) {
    PreprocessOutcome pre = preprocess(img, *defense);
    if (pre.rejected()) {
      out.status = "rejected:" + pre.rejection;
      out.top1 = "(rejected)";
      out.correct = !is_baseline;
      return out;
    }
    defended = std::move(*pre.image);
    input = &defended;
  }
  Classification cls = backend.classify(*input);
  out.top1 = cls.top1().name;
  out.correct = match(matcher, cls);
  return out;
}

}  // namespace

SweepResult run_attack_sweep(const DatasetManifest& manifest, const AttackGrid& grid,
                             Backend& backend, const SweepOptions& options) {
  if (manifest.entries.empty()) throw InvalidParameter("manifest has no entries");
  if (grid.empty()) throw InvalidParameter("attack grid is empty");
  std::set<std::string> unique_cells;
  for (const auto& cell : grid) {
    cell.validate();
    if (!unique_cells.insert(cell.canonical()).second)
      throw InvalidParameter("duplicate attack grid cell: " + cell.canonical());
  }

  const std::string defense_text = options.defense ? options.defense->canonical() : "none";
  const std::string backend_id = backend.id();
  const std::size_t per_image = grid.size() + 1;  // baseline + one row per cell

  // Fusion backgrounds load once, up front.
  std::map<std::string, Image> backgrounds;
  for (const auto& cell : grid)
    if (cell.kind == AttackKind::image_fusion && !backgrounds.count(cell.background))
      backgrounds.emplace(cell.background, load_image(cell.background));

  SweepResult result;
  result.records.resize(manifest.entries.size() * per_image);

  std::atomic<std::size_t> next_image{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next_image.fetch_add(1);
      if (i >= manifest.entries.size()) return;
      const auto& entry = manifest.entries[i];
      const LabelMatcher& matcher = manifest.matcher_for(entry.class_name);
      SweepRecord* rows = result.records.data() + i * per_image;

      try {
        const Image base = clip_to_standard(load_image(manifest.resolve(entry)),
                                            options.clip_size);

        SweepRecord baseline;
        baseline.image_id = entry.path;
        baseline.true_class = entry.class_name;
        baseline.attack = "baseline";
        baseline.defense = defense_text;
        baseline.backend_id = backend_id;
        baseline.seed = derive_seed(options.seed, entry.path + "|baseline").value;
        EvalOutcome base_eval;
        try {
          base_eval = evaluate(base, options.defense, backend, matcher, true);
        } catch (const std::exception& e) {
          if (options.strict) throw;
          base_eval.status = error_token(e);
        }
        baseline.status = base_eval.status;
        baseline.top1_label = base_eval.top1;
        baseline.original_top1_correct = base_eval.correct;
        baseline.adv_top1_correct = base_eval.correct;
        rows[0] = baseline;

        for (std::size_t c = 0; c < grid.size(); ++c) {
          const AttackSpec& cell = grid[c];
          SweepRecord rec;
          rec.image_id = entry.path;
          rec.true_class = entry.class_name;
          rec.attack = cell.canonical();
          rec.defense = defense_text;
          rec.backend_id = backend_id;
          rec.original_top1_correct = baseline.original_top1_correct;
          Seed cell_seed = derive_seed(options.seed, entry.path + "|" + rec.attack);
          rec.seed = cell_seed.value;
          try {
            Image adv = apply_attack(cell, base, cell_seed, &backgrounds);
            rec.quality = quality(adv, base);
            EvalOutcome adv_eval = evaluate(adv, options.defense, backend, matcher, false);
            rec.status = adv_eval.status;
            rec.top1_label = adv_eval.top1;
            rec.adv_top1_correct = adv_eval.correct;
          } catch (const std::exception& e) {
            if (options.strict) throw;
            rec.status = error_token(e);
          }
          rows[c + 1] = rec;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!first_failure) first_failure = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const int workers = std::clamp(options.workers, 1,
                                 static_cast<int>(manifest.entries.size()));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_failure) std::rethrow_exception(first_failure);
  return result;
}

namespace {

struct Tally {
  std::uint64_t rows = 0;
  std::uint64_t errors = 0;
  std::uint64_t counted = 0;
  std::uint64_t correct = 0;
};

// Attack cells in first-appearance order plus the baseline tally.
std::pair<std::vector<std::string>, std::map<std::string, Tally>> tally_cells(
    const SweepResult& result, RateScope scope) {
  std::vector<std::string> order;
  std::map<std::string, Tally> tallies;
  for (const auto& rec : result.records) {
    if (rec.is_baseline()) continue;
    if (!tallies.count(rec.attack)) order.push_back(rec.attack);
    Tally& t = tallies[rec.attack];
    ++t.rows;
    if (rec.errored()) {
      ++t.errors;
      continue;
    }
    if (scope == RateScope::originally_correct && !rec.original_top1_correct) continue;
    ++t.counted;
    if (rec.adv_top1_correct) ++t.correct;
  }
  return {std::move(order), std::move(tallies)};
}

}  // namespace

std::map<std::string, double> escape_rate(const SweepResult& result, RateScope scope) {
  if (result.records.empty()) throw EmptyScope("empty sweep result");
  auto [order, tallies] = tally_cells(result, scope);
  std::map<std::string, double> rates;
  for (const auto& cell : order) {
    const Tally& t = tallies[cell];
    if (t.counted == 0) continue;
    // Complement of accuracy; the single division keeps
    // escape + defense == 1 exact.
    rates[cell] = 1.0 - static_cast<double>(t.correct) / static_cast<double>(t.counted);
  }
  if (rates.empty()) throw EmptyScope("no attacked records in scope");
  return rates;
}

std::map<std::string, double> defense_rate(const SweepResult& result) {
  if (result.records.empty()) throw EmptyScope("empty sweep result");
  auto [order, tallies] = tally_cells(result, RateScope::all);
  std::map<std::string, double> rates;
  for (const auto& cell : order) {
    const Tally& t = tallies[cell];
    if (t.counted == 0) continue;
    rates[cell] = static_cast<double>(t.correct) / static_cast<double>(t.counted);
  }
  if (rates.empty()) throw EmptyScope("no attacked records");
  return rates;
}

std::vector<CellStats> aggregate(const SweepResult& result, RateScope scope) {
  auto [order, tallies] = tally_cells(result, scope);

  std::vector<CellStats> rows;
  for (const auto& cell : order) {
    const Tally& t = tallies[cell];
    CellStats s;
    s.cell = cell;
    s.records = t.rows;
    s.errors = t.errors;
    s.correct = t.correct;
    s.defense_rate = t.counted ? static_cast<double>(t.correct) / static_cast<double>(t.counted) : 0.0;
    s.escape_rate = t.counted ? 1.0 - s.defense_rate : 0.0;
    rows.push_back(s);
  }

  Tally base;
  for (const auto& rec : result.records) {
    if (!rec.is_baseline()) continue;
    ++base.rows;
    if (rec.errored()) {
      ++base.errors;
      continue;
    }
    ++base.counted;
    if (rec.original_top1_correct) ++base.correct;
  }
  if (base.rows > 0) {
    CellStats s;
    s.cell = "baseline";
    s.records = base.rows;
    s.errors = base.errors;
    s.correct = base.correct;
    s.defense_rate = base.counted ? static_cast<double>(base.correct) / static_cast<double>(base.counted) : 0.0;
    s.escape_rate = base.counted ? 1.0 - s.defense_rate : 0.0;
    rows.push_back(s);
  }
  return rows;
}

ConfusionMatrix confusion_matrix(const SweepResult& result,
                                 const std::vector<LabelMatcher>& classes,
                                 const std::string& attack_filter) {
  ConfusionMatrix matrix;
  std::map<std::string, std::size_t> row_of;
  for (const auto& m : classes) {
    row_of[m.class_name] = matrix.classes.size();
    matrix.classes.push_back(m.class_name);
  }
  matrix.counts.assign(classes.size(), std::vector<std::uint64_t>(classes.size() + 1, 0));

  for (const auto& rec : result.records) {
    if (rec.is_baseline() || rec.errored()) continue;
    if (!attack_filter.empty() && rec.attack != attack_filter) continue;
    auto row_it = row_of.find(rec.true_class);
    if (row_it == row_of.end()) continue;

    Classification top;
    top.labels.push_back({rec.top1_label, 1.0});
    std::size_t col = classes.size();  // "other"
    for (std::size_t k = 0; k < classes.size(); ++k)
      if (match(classes[k], top)) {
        col = k;
        break;
      }
    ++matrix.counts[row_it->second][col];
  }
  return matrix;
}

namespace {

nlohmann::ordered_json quality_to_json(const QualityReport& q) {
  nlohmann::ordered_json j;
  j["mse"] = q.mse;
  if (std::isinf(q.psnr)) j["psnr"] = "inf";
  else j["psnr"] = q.psnr;
  j["ssim"] = q.ssim;
  return j;
}

std::string number_text(double v) { return format_number(v); }

}  // namespace

std::string record_to_json_line(const SweepRecord& record) {
  nlohmann::ordered_json j;
  j["v"] = 1;
  j["image"] = record.image_id;
  j["class"] = record.true_class;
  j["attack"] = record.attack;
  j["defense"] = record.defense;
  if (record.quality) j["quality"] = quality_to_json(*record.quality);
  j["original_correct"] = record.original_top1_correct;
  j["adv_correct"] = record.adv_top1_correct;
  j["top1"] = record.top1_label;
  j["backend"] = record.backend_id;
  j["seed"] = record.seed;
  j["status"] = record.status;
  return j.dump();
}

SweepRecord record_from_json_line(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError("bad jsonl record");
  if (j.value("v", 0) != 1) throw ParseError("unsupported record schema version");
  SweepRecord rec;
  rec.image_id = j.at("image").get<std::string>();
  rec.true_class = j.at("class").get<std::string>();
  rec.attack = j.at("attack").get<std::string>();
  rec.defense = j.at("defense").get<std::string>();
  if (j.contains("quality")) {
    QualityReport q;
    q.mse = j["quality"].at("mse").get<double>();
    const auto& p = j["quality"].at("psnr");
    q.psnr = p.is_string() ? psnr_from_string(p.get<std::string>()) : p.get<double>();
    q.ssim = j["quality"].at("ssim").get<double>();
    rec.quality = q;
  }
  rec.original_top1_correct = j.at("original_correct").get<bool>();
  rec.adv_top1_correct = j.at("adv_correct").get<bool>();
  rec.top1_label = j.at("top1").get<std::string>();
  rec.backend_id = j.at("backend").get<std::string>();
  rec.seed = j.at("seed").get<std::uint64_t>();
  rec.status = j.at("status").get<std::string>();
  return rec;
}

void emit_report_jsonl(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report: " + path.string());
  for (const auto& rec : result.records) out << record_to_json_line(rec) << "\n";
  if (!out) throw IoError("short write: " + path.string());
}

void emit_report_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report: " + path.string());
  out << "cell,records,errors,correct,escape_rate,defense_rate\n";
  for (const auto& row : aggregate(result)) {
    out << row.cell << "," << row.records << "," << row.errors << "," << row.correct
        << "," << number_text(row.escape_rate) << "," << number_text(row.defense_rate)
        << "\n";
  }
  if (!out) throw IoError("short write: " + path.string());
}

SweepResult load_report_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("report not found: " + path.string());
  SweepResult result;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    result.records.push_back(record_from_json_line(line));
  }
  return result;
}

Figure figure_from_name(const std::string& name) {
  if (name == "escape_by_level") return Figure::escape_by_level;
  if (name == "psnr_by_alpha") return Figure::psnr_by_alpha;
  if (name == "ssim_by_alpha") return Figure::ssim_by_alpha;
  if (name == "defense_by_ksize") return Figure::defense_by_ksize;
  throw InvalidParameter("unknown figure: " + name);
}

namespace {

struct Series {
  std::string series;
  double x;
  double y;
};

void write_series(const std::vector<Series>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write plot data: " + path.string());
  out << "series,x,y\n";
  for (const auto& r : rows)
    out << r.series << "," << number_text(r.x) << "," << number_text(r.y) << "\n";
}

std::string kind_series(const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::gaussian_noise: return "gaussian";
    case AttackKind::rotation: return "rotate";
    case AttackKind::salt_pepper: return "saltpepper";
    case AttackKind::monochromatization:
    case AttackKind::grayscale: return "mono";
    case AttackKind::image_fusion: return "fusion";
  }
  return "?";
}

// Level position on the x axis: the numeric parameter where there is one,
// else the 1-based level index within the family (mono channels + gray).
double cell_x(const AttackSpec& spec, std::map<std::string, int>& mono_index) {
  switch (spec.kind) {
    case AttackKind::gaussian_noise: return spec.var;
    case AttackKind::rotation: return spec.degree;
    case AttackKind::salt_pepper: return spec.amount;
    case AttackKind::image_fusion: return spec.alpha;
    case AttackKind::monochromatization:
    case AttackKind::grayscale: {
      return static_cast<double>(++mono_index["mono"]);
    }
  }
  return 0.0;
}

// Mean of a per-alpha metric over fusion records.
std::vector<Series> alpha_series(const SweepResult& result, bool use_psnr) {
  std::map<double, std::pair<double, std::uint64_t>> by_alpha;
  for (const auto& rec : result.records) {
    if (rec.is_baseline() || rec.errored() || !rec.quality) continue;
    if (rec.attack.rfind("fusion:", 0) != 0) continue;
    AttackSpec spec = AttackSpec::parse(rec.attack);
    double v = use_psnr ? plot_psnr(rec.quality->psnr) : rec.quality->ssim;
    auto& acc = by_alpha[spec.alpha];
    acc.first += v;
    acc.second += 1;
  }
  std::vector<Series> rows;
  for (const auto& [alpha, acc] : by_alpha)
    rows.push_back({use_psnr ? "psnr" : "ssim", alpha, acc.first / acc.second});
  return rows;
}

}  // namespace

void emit_plot_data(const SweepResult& result, Figure figure,
                    const std::filesystem::path& path) {
  std::vector<Series> rows;
  switch (figure) {
    case Figure::escape_by_level: {
      auto rates = escape_rate(result, RateScope::all);
      std::vector<std::string> order;
      for (const auto& rec : result.records)
        if (!rec.is_baseline() &&
            std::find(order.begin(), order.end(), rec.attack) == order.end())
          order.push_back(rec.attack);
      std::map<std::string, int> mono_index;
      for (const auto& cell : order) {
        auto it = rates.find(cell);
        if (it == rates.end()) continue;
        AttackSpec spec = AttackSpec::parse(cell);
        rows.push_back({kind_series(spec), cell_x(spec, mono_index), it->second});
      }
      break;
    }
    case Figure::psnr_by_alpha:
      rows = alpha_series(result, true);
      break;
    case Figure::ssim_by_alpha:
      rows = alpha_series(result, false);
      break;
    case Figure::defense_by_ksize: {
      // (attack family, defense ksize) -> defended fraction.
      std::map<std::pair<std::string, int>, std::pair<std::uint64_t, std::uint64_t>> acc;
      for (const auto& rec : result.records) {
        if (rec.is_baseline() || rec.errored() || rec.defense == "none") continue;
        DefenseConfig cfg = DefenseConfig::parse(rec.defense);
        if (cfg.filter == FilterKind::none) continue;
        AttackSpec spec = AttackSpec::parse(rec.attack);
        auto& cell = acc[{kind_series(spec), cfg.ksize}];
        ++cell.second;
        if (rec.adv_top1_correct) ++cell.first;
      }
      for (const auto& [key, counts] : acc)
        rows.push_back({key.first, static_cast<double>(key.second),
                        static_cast<double>(counts.first) / counts.second});
      break;
    }
  }
  write_series(rows, path);
}

}  // namespace strobe
