// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "figalign/corpus.hpp"
#include "figalign/figure_splitter.hpp"
#include "figalign/label_matcher.hpp"

namespace figalign {

struct PipelineConfig {
  std::filesystem::path input_manifest;
  std::filesystem::path images_dir;
  std::optional<std::filesystem::path> detections_file;
  /// Without an OCR file every compound figure falls back to whole-caption
  /// pairs.
  std::optional<std::filesystem::path> ocr_file;
  std::filesystem::path output_manifest;
  std::optional<std::string> keyword;
  bool case_insensitive_keyword = true;
  /// Keeps records whose article_type is absent or equal (ignoring case).
  std::optional<std::string> article_type;
  double min_score = 0.5;
  double min_confidence = kDefaultMinConfidence;
  SplitterParams splitter;
  /// Worker threads for per-figure work; 0 picks the hardware concurrency.
  unsigned threads = 1;

  /// Throws Error(InvalidConfig).
  void validate() const;
};

/// Reads a JSON config whose keys mirror PipelineConfig's fields. Relative
/// paths are resolved against the config file's directory.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct PipelineStats {
  int records_in = 0;
  int records_after_filter = 0;
  int compound_count = 0;
  int singleton_count = 0;
  int pairs_out = 0;
  double compound_fraction = 0.0;
  double expansion_ratio = 0.0;
  std::map<PairStatus, int> status_histogram;
  int flagged_captions = 0;
  int skipped_records = 0;
  /// Parenthesized letters ignored because they sat mid-sentence.
  int inline_marker_rejections = 0;
  /// Pairs that reuse a label another region of the same figure matched.
  int repeated_label_matches = 0;

  friend bool operator==(const PipelineStats&, const PipelineStats&) = default;
};

/// Stats sidecar JSON (single line, newline-terminated).
std::string stats_to_json(const PipelineStats& stats);
/// `corpus.jsonl` -> `corpus.stats.json`.
std::filesystem::path stats_sidecar_path(const std::filesystem::path& manifest_path);

/// Keeps records whose caption contains `keyword`; identity when absent.
/// Case folding is ASCII-only. Order is preserved.
std::vector<FigureRecord> filter_corpus(const std::vector<FigureRecord>& records,
                                        const std::optional<std::string>& keyword,
                                        bool case_insensitive = true);

std::vector<FigureRecord> filter_article_type(const std::vector<FigureRecord>& records,
                                              const std::optional<std::string>& article_type);

/// Counts as defined on PipelineStats. A figure with two or more pairs is
/// compound; captions are re-parsed to count flags.
PipelineStats compute_stats(const CorpusManifest& manifest, int records_in);

struct SkippedRecord {
  std::string figure_id;
  std::string reason;
};

/// Where subfigure regions and OCR tokens come from for one alignment run.
struct AlignmentInputs {
  /// Detector output keyed by figure id; when null the splitter runs on
  /// images under `images_dir`.
  const std::map<std::string, DetectionEntry, std::less<>>* detections = nullptr;
  std::filesystem::path images_dir;
  const OcrIndex* ocr = nullptr;
  double min_score = 0.5;
  double min_confidence = kDefaultMinConfidence;
  SplitterParams splitter;
  unsigned threads = 1;
};

struct AlignmentResult {
  CorpusManifest manifest;
  PipelineStats stats;
  std::vector<SkippedRecord> skipped;
  IngestCounters ingest;
};

/// Aligns already-filtered records. Per-record failures are skipped and
/// reported; the result does not depend on thread scheduling.
AlignmentResult align_records(const std::vector<FigureRecord>& records,
                              const AlignmentInputs& inputs, int records_in);

/// Filter, align, and write the manifest plus its stats sidecar.
AlignmentResult run_pipeline(const PipelineConfig& config);

}  // namespace figalign
