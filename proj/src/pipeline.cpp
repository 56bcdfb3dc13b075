// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include "figalign/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <mutex>
#include <thread>

#include "figalign/caption_parser.hpp"
#include "figalign/error.hpp"
#include "figalign/image.hpp"
#include "json_io.hpp"

namespace figalign {

namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

[[noreturn]] void bad_config(const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, why);
}

}  // namespace

void PipelineConfig::validate() const {
  if (input_manifest.empty()) bad_config("input_manifest is required");
  if (output_manifest.empty()) bad_config("output_manifest is required");
  if (std::filesystem::weakly_canonical(input_manifest) ==
      std::filesystem::weakly_canonical(output_manifest))
    bad_config("output_manifest must differ from input_manifest");
  if (!detections_file && images_dir.empty())
    bad_config("either detections_file or images_dir must be set");
  if (!(min_score >= 0.0 && min_score <= 1.0)) bad_config("min_score must be in [0,1]");
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0))
    bad_config("min_confidence must be in [0,1]");
  if (keyword && keyword->empty()) bad_config("keyword must be non-empty when given");
  splitter.validate();
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  detail::Json j;
  try {
    j = detail::Json::parse(text);
  } catch (const detail::Json::parse_error& e) {
    bad_config(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad_config("config must be a JSON object");

  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_relative() ? base / fp : fp;
  };

  PipelineConfig c;
  try {
    detail::check_keys(j, {"input_manifest", "images_dir", "detections_file", "ocr_file",
                           "output_manifest", "keyword", "case_insensitive_keyword",
                           "article_type", "min_score", "min_confidence", "splitter", "threads"});
    c.input_manifest = resolve(detail::require_string(j, "input_manifest"));
    c.output_manifest = resolve(detail::require_string(j, "output_manifest"));
    if (auto v = detail::optional_string(j, "images_dir")) c.images_dir = resolve(*v);
    if (auto v = detail::optional_string(j, "detections_file")) c.detections_file = resolve(*v);
    if (auto v = detail::optional_string(j, "ocr_file")) c.ocr_file = resolve(*v);
    c.keyword = detail::optional_string(j, "keyword");
    c.article_type = detail::optional_string(j, "article_type");
    if (j.contains("case_insensitive_keyword")) {
      if (!j["case_insensitive_keyword"].is_boolean())
        throw std::runtime_error("field \"case_insensitive_keyword\" must be a boolean");
      c.case_insensitive_keyword = j["case_insensitive_keyword"].get<bool>();
    }
    if (j.contains("min_score")) c.min_score = detail::require_number(j, "min_score");
    if (j.contains("min_confidence"))
      c.min_confidence = detail::require_number(j, "min_confidence");
    if (j.contains("threads")) {
      auto t = detail::require_int(j, "threads");
      if (t < 0 || t > 1024) throw std::runtime_error("field \"threads\" out of range");
      c.threads = static_cast<unsigned>(t);
    }
    if (j.contains("splitter")) {
      const auto& s = j["splitter"];
      if (!s.is_object()) throw std::runtime_error("field \"splitter\" must be an object");
      detail::check_keys(s, {"white_threshold", "min_gutter_px", "min_panel_px",
                             "max_recursion_depth"});
      auto get = [&](const char* key, int& dst) {
        if (s.contains(key)) dst = static_cast<int>(detail::require_int(s, key));
      };
      get("white_threshold", c.splitter.white_threshold);
      get("min_gutter_px", c.splitter.min_gutter_px);
      get("min_panel_px", c.splitter.min_panel_px);
      get("max_recursion_depth", c.splitter.max_recursion_depth);
    }
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const Error*>(&e)) throw;
    bad_config(e.what());
  }
  c.validate();
  return c;
}

std::string stats_to_json(const PipelineStats& s) {
  detail::OrderedJson o;
  o["records_in"] = s.records_in;
  o["records_after_filter"] = s.records_after_filter;
  o["compound_count"] = s.compound_count;
  o["singleton_count"] = s.singleton_count;
  o["pairs_out"] = s.pairs_out;
  o["compound_fraction"] = s.compound_fraction;
  o["expansion_ratio"] = s.expansion_ratio;
  detail::OrderedJson hist = detail::OrderedJson::object();
  for (PairStatus st :
       {PairStatus::UniqueLabel, PairStatus::FallbackWholeCaption, PairStatus::Singleton}) {
    auto it = s.status_histogram.find(st);
    hist[std::string(to_string(st))] = it == s.status_histogram.end() ? 0 : it->second;
  }
  o["status_histogram"] = std::move(hist);
  o["flagged_captions"] = s.flagged_captions;
  o["skipped_records"] = s.skipped_records;
  o["inline_marker_rejections"] = s.inline_marker_rejections;
  o["repeated_label_matches"] = s.repeated_label_matches;
  return detail::dump_line(o) + "\n";
}

std::filesystem::path stats_sidecar_path(const std::filesystem::path& manifest_path) {
  std::filesystem::path p = manifest_path;
  p.replace_extension(".stats.json");
  return p;
}

std::vector<FigureRecord> filter_corpus(const std::vector<FigureRecord>& records,
                                        const std::optional<std::string>& keyword,
                                        bool case_insensitive) {
  if (!keyword) return records;
  const std::string needle = case_insensitive ? ascii_lower(*keyword) : *keyword;
  std::vector<FigureRecord> out;
  for (const auto& r : records) {
    const std::string hay = case_insensitive ? ascii_lower(r.caption) : r.caption;
    if (hay.find(needle) != std::string::npos) out.push_back(r);
  }
  return out;
}

std::vector<FigureRecord> filter_article_type(const std::vector<FigureRecord>& records,
                                              const std::optional<std::string>& article_type) {
  if (!article_type) return records;
  const std::string want = ascii_lower(*article_type);
  std::vector<FigureRecord> out;
  for (const auto& r : records)
    if (!r.article_type || ascii_lower(*r.article_type) == want) out.push_back(r);
  return out;
}

PipelineStats compute_stats(const CorpusManifest& manifest, int records_in) {
  PipelineStats s;
  s.records_in = records_in;
  s.records_after_filter = static_cast<int>(manifest.records.size());
  s.pairs_out = static_cast<int>(manifest.pairs.size());
  for (PairStatus st :
       {PairStatus::UniqueLabel, PairStatus::FallbackWholeCaption, PairStatus::Singleton})
    s.status_histogram[st] = 0;

  std::map<std::string_view, int> pairs_per_figure;
  for (const auto& p : manifest.pairs) {
    ++pairs_per_figure[p.figure_id];
    ++s.status_histogram[p.status];
  }
  for (const auto& r : manifest.records) {
    auto it = pairs_per_figure.find(r.figure_id);
    const int n = it == pairs_per_figure.end() ? 0 : it->second;
    (n >= 2 ? s.compound_count : s.singleton_count) += 1;
    const CaptionParse parse = parse_caption(r.caption);
    if (parse.flagged()) ++s.flagged_captions;
    s.inline_marker_rejections += parse.inline_rejections;
  }
  CorpusManifest sorted = manifest;
  normalize_order(sorted);
  s.repeated_label_matches = count_repeated_labels(sorted.pairs);

  if (s.records_after_filter > 0) {
    s.compound_fraction = static_cast<double>(s.compound_count) / s.records_after_filter;
    s.expansion_ratio = static_cast<double>(s.pairs_out) / s.records_after_filter;
  }
  return s;
}

namespace {

struct RecordOutcome {
  std::optional<FigureRecord> record;
  std::vector<AlignedPair> pairs;
  std::optional<SkippedRecord> skipped;
  IngestCounters ingest;
};

AlignedPair singleton_pair(const FigureRecord& r) {
  return {r.figure_id + "#0", r.figure_id, std::nullopt, std::nullopt, r.caption,
          PairStatus::Singleton};
}

std::vector<SubfigureRegion> regions_for(const FigureRecord& r, const AlignmentInputs& in,
                                         IngestCounters& counters) {
  if (in.detections) {
    auto it = in.detections->find(r.figure_id);
    if (it == in.detections->end()) return {};
    const DetectionEntry& e = it->second;
    std::pair<int, int> dims{e.image_width, e.image_height};
    if (!in.images_dir.empty() && !r.image_path.empty()) {
      const auto img = in.images_dir / r.image_path;
      if (std::filesystem::exists(img) && read_image_size(img) != dims)
        throw Error(ErrorCode::SchemaViolation, "declared image size disagrees with the image",
                    r.figure_id, e.line);
    }
    return regions_from_entry(e, dims, in.min_score, &counters);
  }
  const GrayImage image = load_image(in.images_dir / r.image_path);
  return split_compound(image, in.splitter, r.figure_id);
}

RecordOutcome align_one(const FigureRecord& record, const AlignmentInputs& in) {
  RecordOutcome out;
  try {
    FigureRecord r = record;
    const CaptionParse parse = parse_caption(r.caption);
    if (!parse.shared_context.empty()) r.shared_context = parse.shared_context;

    const auto regions = regions_for(r, in, out.ingest);
    if (regions.size() <= 1) {
      out.pairs.push_back(singleton_pair(r));
    } else {
      std::vector<OcrToken> tokens;
      if (in.ocr) {
        if (auto it = in.ocr->find(r.figure_id); it != in.ocr->end()) {
          if (it->second.error)
            throw Error(ErrorCode::SchemaViolation, "malformed OCR entry: " + *it->second.error,
                        r.figure_id, it->second.line);
          tokens = it->second.tokens;
        }
      }
      const auto label_sets = assign_tokens(regions, tokens, in.min_confidence);
      out.pairs = match_subfigures(label_sets, parse.segments, r.caption);
    }
    out.record = std::move(r);
  } catch (const Error& e) {
    if (is_config_error(e.code())) throw;
    out.pairs.clear();
    out.skipped = SkippedRecord{record.figure_id, e.what()};
  }
  return out;
}

}  // namespace

AlignmentResult align_records(const std::vector<FigureRecord>& records,
                              const AlignmentInputs& inputs, int records_in) {
  std::vector<RecordOutcome> outcomes(records.size());
  unsigned workers = inputs.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : inputs.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, records.size())));

  if (workers <= 1) {
    for (std::size_t i = 0; i < records.size(); ++i) outcomes[i] = align_one(records[i], inputs);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < records.size();) {
          try {
            outcomes[i] = align_one(records[i], inputs);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (first_error) std::rethrow_exception(first_error);
  }

  AlignmentResult result;
  for (auto& o : outcomes) {
    if (o.record) result.manifest.records.push_back(std::move(*o.record));
    for (auto& p : o.pairs) result.manifest.pairs.push_back(std::move(p));
    if (o.skipped) result.skipped.push_back(std::move(*o.skipped));
    result.ingest.below_min_score += o.ingest.below_min_score;
    result.ingest.overlap_rejected += o.ingest.overlap_rejected;
  }
  normalize_order(result.manifest);
  result.stats = compute_stats(result.manifest, records_in);
  result.stats.skipped_records = static_cast<int>(result.skipped.size());
  return result;
}

AlignmentResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  const CorpusManifest input = load_manifest(config.input_manifest);
  const int records_in = static_cast<int>(input.records.size());

  auto records = filter_article_type(input.records, config.article_type);
  records = filter_corpus(records, config.keyword, config.case_insensitive_keyword);

  std::map<std::string, DetectionEntry, std::less<>> detections;
  OcrIndex ocr;
  AlignmentInputs inputs;
  inputs.images_dir = config.images_dir;
  inputs.min_score = config.min_score;
  inputs.min_confidence = config.min_confidence;
  inputs.splitter = config.splitter;
  inputs.threads = config.threads;

  if (config.detections_file) {
    std::map<std::string_view, bool> known;
    for (const auto& r : input.records) known[r.figure_id] = true;
    for (auto& e : read_detections(*config.detections_file)) {
      if (!known.count(e.figure_id))
        throw Error(ErrorCode::UnknownFigure, "detections name a figure missing from the manifest",
                    e.figure_id, e.line);
      std::string id = e.figure_id;
      detections.emplace(std::move(id), std::move(e));
    }
    inputs.detections = &detections;
  }
  if (config.ocr_file) {
    ocr = read_ocr(*config.ocr_file);
    inputs.ocr = &ocr;
  }

  AlignmentResult result = align_records(records, inputs, records_in);
  save_manifest(result.manifest, config.output_manifest);
  detail::write_file(stats_sidecar_path(config.output_manifest), stats_to_json(result.stats));
  return result;
}

}  // namespace figalign
