// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "figalign/corpus.hpp"
#include "figalign/image.hpp"

namespace figalign {

/// One panel of a figure. `order_index` is the row-major reading order
/// (sorted by box origin y, then x).
struct SubfigureRegion {
  std::string figure_id;
  BoundingBox box;
  double score = 1.0;
  int order_index = 0;

  friend bool operator==(const SubfigureRegion&, const SubfigureRegion&) = default;
};

struct SplitterParams {
  int white_threshold = 245;  ///< luminance >= this counts as background
  int min_gutter_px = 6;
  int min_panel_px = 32;
  int max_recursion_depth = 6;

  /// Throws Error(InvalidConfig) on out-of-range values.
  void validate() const;
};

/// Recursive whitespace-gutter splitter. Cuts at the midpoint of the longest
/// all-background row or column run (ties: vertical first, then smaller
/// coordinate) as long as both sides keep at least min_panel_px of content
/// in each dimension. Leaves are tightened to their content. An all-white
/// image yields one full-image region.
std::vector<SubfigureRegion> split_compound(const GrayImage& image,
                                            const SplitterParams& params = {},
                                            const std::string& figure_id = {});

/// True iff the regions describe more than one panel. Throws
/// Error(MixedFigureIds) when the regions span several figures.
bool is_compound(const std::vector<SubfigureRegion>& regions);

/// Sorts by (y, x) and renumbers order_index from 0.
void assign_reading_order(std::vector<SubfigureRegion>& regions);

// --- detections interchange -------------------------------------------------

struct RawDetection {
  BoundingBox box;
  double score = 0.0;
};

/// One line of the detections JSONL file.
struct DetectionEntry {
  std::string figure_id;
  int image_width = 0;
  int image_height = 0;
  std::vector<RawDetection> regions;
  std::size_t line = 0;
};

/// Parses a detections file. Throws Error(SchemaViolation) with the line
/// number for malformed or duplicated entries, Error(MissingFile) if absent.
std::vector<DetectionEntry> read_detections(const std::filesystem::path& path);
std::vector<DetectionEntry> parse_detections(std::string_view text,
                                             std::string_view source = "<memory>");

/// Serializes entries one per line in the given order.
std::string serialize_detections(const std::vector<DetectionEntry>& entries);
void write_detections(const std::vector<DetectionEntry>& entries,
                      const std::filesystem::path& path);

/// Builds a detections entry from splitter output.
DetectionEntry to_detection_entry(const std::string& figure_id, int width, int height,
                                  const std::vector<SubfigureRegion>& regions);

struct IngestCounters {
  int below_min_score = 0;
  int overlap_rejected = 0;  ///< IoU > 0.2 with a higher-scoring box
};

/// Maximum IoU two kept detector boxes may share.
inline constexpr double kMaxDetectionOverlap = 0.2;

/// Turns one entry into regions: drops boxes under `min_score`, resolves
/// overlaps greedily by score, and assigns reading order. Boxes must fit in
/// `dims`; throws Error(OutOfBounds) otherwise.
std::vector<SubfigureRegion> regions_from_entry(const DetectionEntry& entry,
                                                std::pair<int, int> dims, double min_score,
                                                IngestCounters* counters = nullptr);

using ImageDims = std::map<std::string, std::pair<int, int>, std::less<>>;

/// Reads a detections file and converts every entry. Regions are grouped by
/// figure in file order. Throws SchemaViolation, UnknownFigure or OutOfBounds.
std::vector<SubfigureRegion> ingest_detections(const std::filesystem::path& detections_file,
                                               const ImageDims& image_dims, double min_score,
                                               IngestCounters* counters = nullptr);

}  // namespace figalign
