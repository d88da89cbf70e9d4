// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strobe/attacks.hpp"
#include "strobe/classifier.hpp"
#include "strobe/defenses.hpp"
#include "strobe/metrics.hpp"

namespace strobe {

struct ManifestEntry {
  std::string path;        // as written in the manifest
  std::string class_name;
};

/// Evaluation dataset: images with ground-truth classes plus one label
/// matcher per class.
///
/// Manifest CSV format: header `path,class,synonyms`, one row per image,
/// synonyms `|`-separated (may be empty). Relative paths resolve against
/// the manifest's directory. Synonyms accumulate per class across rows.
struct DatasetManifest {
  std::string id;
  std::vector<ManifestEntry> entries;
  std::map<std::string, LabelMatcher> matchers;
  std::filesystem::path base_dir;

  const LabelMatcher& matcher_for(const std::string& class_name) const;
  std::filesystem::path resolve(const ManifestEntry& entry) const;
  std::vector<std::string> class_list() const;  // first-appearance order
};

DatasetManifest load_manifest(const std::filesystem::path& csv_path);

/// One (image, attack cell) evaluation outcome. Baseline rows (the
/// unattacked classification, one per image) carry attack == "baseline"
/// and no quality report.
struct SweepRecord {
  std::string image_id;
  std::string true_class;
  std::string attack;   // canonical AttackSpec or "baseline"
  std::string defense;  // canonical DefenseConfig or "none"
  std::optional<QualityReport> quality;
  bool original_top1_correct = false;
  bool adv_top1_correct = false;
  std::string top1_label;
  std::string backend_id;
  std::uint64_t seed = 0;
  std::string status;  // "ok" | "rejected:<verdict>" | "error:<kind>"

  bool is_baseline() const { return attack == "baseline"; }
  bool errored() const { return status.rfind("error:", 0) == 0; }
};

struct SweepResult {
  std::vector<SweepRecord> records;
};

struct SweepOptions {
  std::optional<DefenseConfig> defense;
  Seed seed;
  int workers = 4;      // bounded fan-out over images
  bool strict = false;  // fail fast instead of annotating error records
  int clip_size = 224;
};

/// Evaluate every (image, cell) pair: clip to the standard size, attack
/// (per-record derived seed), optionally preprocess, classify. Record
/// order is manifest order x grid order (baseline row first per image),
/// independent of execution interleaving. Backend errors annotate records
/// unless `strict`.
SweepResult run_attack_sweep(const DatasetManifest& manifest, const AttackGrid& grid,
                             Backend& backend, const SweepOptions& options);

enum class RateScope { all, originally_correct };

/// Escape rate per attack cell: fraction of attacked records whose top-1
/// no longer matches the true class. `originally_correct` restricts the
/// denominator to images whose baseline classification was correct.
std::map<std::string, double> escape_rate(const SweepResult& result, RateScope scope);

/// Defense rate per attack cell: top-1 accuracy over attacked records;
/// the exact complement of escape_rate on scope == all.
std::map<std::string, double> defense_rate(const SweepResult& result);

/// Per-cell aggregate counts in record (grid) order; baseline row last.
struct CellStats {
  std::string cell;
  std::uint64_t records = 0;  // all rows for the cell
  std::uint64_t errors = 0;   // rows excluded from rates
  std::uint64_t correct = 0;  // top-1 correct among counted rows
  double escape_rate = 0.0;
  double defense_rate = 0.0;
};
std::vector<CellStats> aggregate(const SweepResult& result,
                                 RateScope scope = RateScope::all);

/// Rows: true class; columns: predicted class (first matcher that matches
/// the top-1 label, in `classes` order) or the trailing "other" column.
/// Covers attacked, non-errored records; `attack_filter` narrows to one
/// cell when non-empty.
struct ConfusionMatrix {
  std::vector<std::string> classes;                  // row/column labels; last column is "other"
  std::vector<std::vector<std::uint64_t>> counts;    // classes.size() x (classes.size() + 1)
};
ConfusionMatrix confusion_matrix(const SweepResult& result,
                                 const std::vector<LabelMatcher>& classes,
                                 const std::string& attack_filter = "");

// Report emission. jsonl: one schema-versioned record per line. csv: one
// aggregate row per attack cell plus the baseline row, counts included.
void emit_report_jsonl(const SweepResult& result, const std::filesystem::path& path);
void emit_report_csv(const SweepResult& result, const std::filesystem::path& path);
SweepResult load_report_jsonl(const std::filesystem::path& path);

std::string record_to_json_line(const SweepRecord& record);
SweepRecord record_from_json_line(const std::string& line);

/// Plot-ready series (CSV `series,x,y`). The PSNR display convention
/// (+inf plotted as 40) applies here and only here.
enum class Figure { escape_by_level, psnr_by_alpha, ssim_by_alpha, defense_by_ksize };
Figure figure_from_name(const std::string& name);
void emit_plot_data(const SweepResult& result, Figure figure,
                    const std::filesystem::path& path);

}  // namespace strobe
