// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "figalign/caption_parser.hpp"
#include "figalign/corpus.hpp"
#include "figalign/figure_splitter.hpp"
#include "figalign/label_set.hpp"

namespace figalign {

/// A recognized text fragment in figure coordinates.
struct OcrToken {
  std::string figure_id;
  std::string text;
  BoundingBox box;
  double confidence = 0.0;

  friend bool operator==(const OcrToken&, const OcrToken&) = default;
};

struct RegionLabelSet {
  SubfigureRegion region;
  LabelSet candidate_labels;
};

inline constexpr double kDefaultMinConfidence = 0.5;

/// Strips surrounding punctuation and whitespace; a lone Latin letter that
/// survives is returned lowercased. Tokens under `min_confidence` yield
/// nothing.
std::optional<char> normalize_token(const OcrToken& token,
                                    double min_confidence = kDefaultMinConfidence);

/// Assigns each token to the region containing its box center. A center
/// inside several regions goes to the nearest region center (ties: lower
/// order_index). Output follows order_index. Throws Error(MixedFigureIds).
std::vector<RegionLabelSet> assign_tokens(const std::vector<SubfigureRegion>& regions,
                                          const std::vector<OcrToken>& tokens,
                                          double min_confidence = kDefaultMinConfidence);

/// Binds every region to one text. A region whose candidate labels meet the
/// caption's labels in exactly one letter gets that subcaption; zero or
/// several matches fall back to the whole caption. One region against an
/// unlabeled caption is a singleton. Throws Error(EmptyRegions) or
/// Error(MixedFigureIds).
std::vector<AlignedPair> match_subfigures(const std::vector<RegionLabelSet>& label_sets,
                                          const std::vector<SubcaptionSegment>& segments,
                                          const std::string& full_caption);

/// Pairs beyond the first that reuse a label already matched in the same
/// figure.
int count_repeated_labels(const std::vector<AlignedPair>& pairs);

// --- OCR interchange ---------------------------------------------------------

/// One line of the OCR JSONL file. A line whose tokens do not validate keeps
/// its figure id and carries the reason in `error` so callers can skip just
/// that figure.
struct OcrEntry {
  std::string figure_id;
  std::vector<OcrToken> tokens;
  std::size_t line = 0;
  std::optional<std::string> error;
};

using OcrIndex = std::map<std::string, OcrEntry, std::less<>>;

/// Throws Error(SchemaViolation) for lines without a usable figure_id or
/// repeated figure ids, Error(MissingFile) if absent.
OcrIndex read_ocr(const std::filesystem::path& path);
OcrIndex parse_ocr(std::string_view text, std::string_view source = "<memory>");

std::string serialize_ocr(const std::vector<OcrEntry>& entries);

}  // namespace figalign
