// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors
//
// figalign: turn figure-caption records into aligned subfigure/subcaption
// pairs and score retrieval embeddings.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "figalign/caption_parser.hpp"
#include "figalign/corpus.hpp"
#include "figalign/error.hpp"
#include "figalign/figure_splitter.hpp"
#include "figalign/image.hpp"
#include "figalign/pipeline.hpp"
#include "figalign/retrieval.hpp"

namespace fs = std::filesystem;
using figalign::Error;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(figalign::ErrorCode::IoFailure, "cannot open for writing", path.string());
  out << text;
  if (!out) throw Error(figalign::ErrorCode::IoFailure, "write failed", path.string());
}

void report_alignment(const figalign::AlignmentResult& result) {
  for (const auto& s : result.skipped)
    std::cerr << "skipped " << s.figure_id << ": " << s.reason << '\n';
  if (result.ingest.overlap_rejected > 0)
    std::cerr << "warning: " << result.ingest.overlap_rejected
              << " detector boxes dropped for overlapping a higher-scoring box\n";
  std::cout << figalign::stats_to_json(result.stats);
}

int cmd_parse_captions(const fs::path& input, const fs::path& output) {
  const auto manifest = figalign::load_manifest(input);
  std::string out;
  for (const auto& r : manifest.records) {
    const auto parse = figalign::parse_caption(r.caption);
    nlohmann::ordered_json line;
    line["figure_id"] = r.figure_id;
    if (!parse.shared_context.empty()) line["shared_context"] = parse.shared_context;
    auto flags = nlohmann::ordered_json::array();
    if (parse.duplicate_label) flags.push_back("duplicate_label");
    if (parse.empty_segment) flags.push_back("empty_segment");
    line["flags"] = std::move(flags);
    line["segments"] = nlohmann::ordered_json::array();
    for (const auto& s : parse.segments) {
      nlohmann::ordered_json seg;
      if (s.label) seg["label"] = std::string(1, *s.label);
      seg["text"] = s.text;
      seg["span"] = {s.start, s.end};
      line["segments"].push_back(std::move(seg));
    }
    out += line.dump() + "\n";
  }
  write_text(output, out);
  return kExitOk;
}

int cmd_split_figures(const fs::path& images, const fs::path& output,
                      const std::string& manifest_path, const figalign::SplitterParams& params) {
  params.validate();
  struct Job {
    std::string figure_id;
    fs::path image;
  };
  std::vector<Job> jobs;
  if (!manifest_path.empty()) {
    for (const auto& r : figalign::load_manifest(manifest_path).records)
      jobs.push_back({r.figure_id, images / r.image_path});
  } else {
    if (!fs::is_directory(images))
      throw Error(figalign::ErrorCode::MissingFile, "not a directory", images.string());
    for (const auto& entry : fs::directory_iterator(images))
      if (entry.is_regular_file() && figalign::is_supported_image(entry.path()))
        jobs.push_back({entry.path().stem().string(), entry.path()});
    std::sort(jobs.begin(), jobs.end(),
              [](const Job& a, const Job& b) { return a.figure_id < b.figure_id; });
  }

  std::vector<figalign::DetectionEntry> entries;
  int failures = 0;
  for (const auto& job : jobs) {
    try {
      const auto image = figalign::load_image(job.image);
      const auto regions = figalign::split_compound(image, params, job.figure_id);
      entries.push_back(
          figalign::to_detection_entry(job.figure_id, image.width(), image.height(), regions));
    } catch (const Error& e) {
      ++failures;
      std::cerr << "skipped " << job.figure_id << ": " << e.what() << '\n';
    }
  }
  figalign::write_detections(entries, output);
  std::cerr << entries.size() << " figures split, " << failures << " skipped\n";
  return kExitOk;
}

std::vector<std::size_t> parse_ks(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      ks.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw Error(figalign::ErrorCode::InvalidConfig, "bad --k entry \"" + item + "\"");
    }
  }
  if (ks.empty()) throw Error(figalign::ErrorCode::InvalidConfig, "--k needs at least one value");
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Align compound-figure panels with their subcaptions and score retrieval"};
  app.require_subcommand(1);

  fs::path in_manifest, out_path;

  auto* parse_cmd = app.add_subcommand("parse-captions", "Segment every caption in a manifest");
  parse_cmd->add_option("--input", in_manifest, "Input manifest (JSONL)")->required();
  parse_cmd->add_option("--output", out_path, "Segments output (JSONL)")->required();

  fs::path images_dir;
  std::string split_manifest;
  figalign::SplitterParams params;
  auto* split_cmd = app.add_subcommand("split-figures", "Split figure images at whitespace gutters");
  split_cmd->add_option("--images", images_dir, "Image directory")->required();
  split_cmd->add_option("--output", out_path, "Detections output (JSONL)")->required();
  split_cmd->add_option("--manifest", split_manifest,
                        "Take figure ids and image paths from this manifest");
  split_cmd->add_option("--white-threshold", params.white_threshold, "Background luminance")
      ->capture_default_str();
  split_cmd->add_option("--min-gutter", params.min_gutter_px, "Minimum gutter width in px")
      ->capture_default_str();
  split_cmd->add_option("--min-panel", params.min_panel_px, "Minimum panel size in px")
      ->capture_default_str();
  split_cmd->add_option("--max-depth", params.max_recursion_depth, "Maximum recursion depth")
      ->capture_default_str();

  fs::path detections, ocr;
  double min_score = 0.5, min_confidence = figalign::kDefaultMinConfidence;
  auto* match_cmd = app.add_subcommand("match", "Align a manifest from detector and OCR output");
  match_cmd->add_option("--input", in_manifest, "Input manifest")->required();
  match_cmd->add_option("--detections", detections, "Detections (JSONL)")->required();
  match_cmd->add_option("--ocr", ocr, "OCR tokens (JSONL)")->required();
  match_cmd->add_option("--output", out_path, "Output manifest")->required();
  match_cmd->add_option("--min-score", min_score, "Detector score threshold")->capture_default_str();
  match_cmd->add_option("--min-confidence", min_confidence, "OCR confidence threshold")
      ->capture_default_str();

  fs::path config_path;
  auto* run_cmd = app.add_subcommand("run", "Run the whole pipeline from a JSON config");
  run_cmd->add_option("--config", config_path, "Pipeline config (JSON)")->required();

  int records_in = -1;
  auto* stats_cmd = app.add_subcommand("stats", "Print corpus statistics for a manifest");
  stats_cmd->add_option("--input", in_manifest, "Manifest")->required();
  stats_cmd->add_option("--records-in", records_in,
                        "Records before filtering (defaults to the manifest's record count)");

  fs::path image_emb, text_emb, json_out;
  std::string ks_text = "1,10";
  auto* eval_cmd = app.add_subcommand("eval-retrieval", "Image-text retrieval recall@k");
  eval_cmd->add_option("--image-emb", image_emb, "Image embeddings (JSONL)")->required();
  eval_cmd->add_option("--text-emb", text_emb, "Text embeddings (JSONL)")->required();
  eval_cmd->add_option("--k", ks_text, "Comma-separated cutoffs")->capture_default_str();
  eval_cmd->add_option("--json", json_out, "Also write the report as JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*parse_cmd) return cmd_parse_captions(in_manifest, out_path);
    if (*split_cmd) return cmd_split_figures(images_dir, out_path, split_manifest, params);
    if (*match_cmd) {
      figalign::PipelineConfig config;
      config.input_manifest = in_manifest;
      config.detections_file = detections;
      config.ocr_file = ocr;
      config.output_manifest = out_path;
      config.min_score = min_score;
      config.min_confidence = min_confidence;
      report_alignment(figalign::run_pipeline(config));
      return kExitOk;
    }
    if (*run_cmd) {
      report_alignment(figalign::run_pipeline(figalign::load_pipeline_config(config_path)));
      return kExitOk;
    }
    if (*stats_cmd) {
      const auto manifest = figalign::load_manifest(in_manifest);
      const int n = records_in >= 0 ? records_in : static_cast<int>(manifest.records.size());
      std::cout << figalign::stats_to_json(figalign::compute_stats(manifest, n));
      return kExitOk;
    }
    if (*eval_cmd) {
      const auto ks = parse_ks(ks_text);
      const auto report = figalign::eval_report(figalign::load_embeddings(image_emb),
                                                figalign::load_embeddings(text_emb), ks);
      std::cout << report.to_table();
      if (!json_out.empty()) write_text(json_out, report.to_json() + "\n");
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return figalign::is_config_error(e.code()) ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
