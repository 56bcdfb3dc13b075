// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace figalign {

/// Axis-aligned pixel rectangle, top-left origin. Valid boxes have
/// w > 0, h > 0, x >= 0 and y >= 0.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool valid() const { return w > 0 && h > 0 && x >= 0 && y >= 0; }
  std::int64_t area() const { return std::int64_t{w} * h; }
  int right() const { return x + w; }
  int bottom() const { return y + h; }
  double center_x() const { return x + w / 2.0; }
  double center_y() const { return y + h / 2.0; }
  bool contains_point(double px, double py) const {
    return px >= x && px < right() && py >= y && py < bottom();
  }
  bool inside(int width, int height) const {
    return x >= 0 && y >= 0 && right() <= width && bottom() <= height;
  }

  friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;
};

double intersection_over_union(const BoundingBox& a, const BoundingBox& b);

/// One collected image-caption pair with article metadata.
struct FigureRecord {
  std::string figure_id;
  std::string image_path;
  std::string caption;
  std::optional<std::string> journal;
  std::optional<int> year;
  std::optional<std::string> article_type;
  /// Caption text preceding the first label marker, filled in by alignment.
  std::optional<std::string> shared_context;

  friend bool operator==(const FigureRecord&, const FigureRecord&) = default;
};

enum class PairStatus { UniqueLabel, FallbackWholeCaption, Singleton };

std::string_view to_string(PairStatus status) noexcept;
std::optional<PairStatus> parse_pair_status(std::string_view text) noexcept;

/// One subfigure (or the whole figure, when `region` is absent) bound to a
/// single text.
struct AlignedPair {
  std::string pair_id;
  std::string figure_id;
  std::optional<BoundingBox> region;
  std::optional<char> label;
  std::string text;
  PairStatus status = PairStatus::Singleton;

  friend bool operator==(const AlignedPair&, const AlignedPair&) = default;
};

struct CorpusManifest {
  std::vector<FigureRecord> records;
  std::vector<AlignedPair> pairs;

  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

/// Returns one description per violated FigureRecord invariant, each naming
/// the failing field. Empty means the record is valid.
std::vector<std::string> validate_record(const FigureRecord& record);

/// Returns a description of the first field-presence violation for `pair`
/// given its parent caption, or nullopt.
std::optional<std::string> validate_pair(const AlignedPair& pair,
                                         std::string_view full_caption);

/// Sorts records by figure_id and pairs by (figure_id, region.x, region.y)
/// with whole-figure pairs first. Remaining ties are broken by the rest of
/// the region and then pair_id so the order is total.
void normalize_order(CorpusManifest& manifest);

/// Reads a JSONL manifest, validates every invariant and normalizes order.
/// Throws Error with MissingFile, MalformedLine, DuplicateId or
/// DanglingReference.
CorpusManifest load_manifest(const std::filesystem::path& path);

/// Parses manifest text held in memory. `source` is used in error messages.
CorpusManifest parse_manifest(std::string_view text,
                              std::string_view source = "<memory>");

/// Writes the canonical form: sorted, fixed key order, one object per line.
void save_manifest(const CorpusManifest& manifest,
                   const std::filesystem::path& path);

/// Canonical serialization used by save_manifest.
std::string serialize_manifest(const CorpusManifest& manifest);

}  // namespace figalign
