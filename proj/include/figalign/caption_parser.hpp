// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "figalign/label_set.hpp"

namespace figalign {

/// A recognized subcaption label such as "(A)", "b)", "C." or "(a-c)".
struct LabelMarker {
  std::size_t byte_offset = 0;  ///< start of the marker, inclusive
  std::size_t marker_len = 0;   ///< bytes, including brackets and terminator
  LabelSet letters;

  std::size_t end() const { return byte_offset + marker_len; }
  friend bool operator==(const LabelMarker&, const LabelMarker&) = default;
};

/// A labeled span of caption text with its marker stripped and whitespace
/// trimmed. `caption.substr(start, end - start) == text` always holds.
struct SubcaptionSegment {
  std::optional<char> label;
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const SubcaptionSegment&, const SubcaptionSegment&) = default;
};

/// Everything the parser learns about one caption.
struct CaptionParse {
  std::vector<LabelMarker> markers;
  std::vector<SubcaptionSegment> segments;
  /// Trimmed text before the first marker; empty when there is none or the
  /// caption ended up unlabeled.
  std::string shared_context;
  /// The same letter came from two markers; segments fell back to one
  /// unlabeled segment.
  bool duplicate_label = false;
  /// At least one marker was followed directly by another marker (or the
  /// caption end) and its empty segment was dropped.
  bool empty_segment = false;
  /// Parenthesized label candidates rejected because they sat mid-sentence.
  int inline_rejections = 0;

  bool flagged() const { return duplicate_label || empty_segment; }
  /// Distinct labels carried by the segments.
  LabelSet labels() const;
};

/// Expands the inside of a label marker ("b", "A, B", "a-c", "a–c", "a~c",
/// "a & b") into its letters. Ranges must be ascending and cover at most
/// eight letters. Returns nullopt for anything else.
std::optional<LabelSet> try_expand_range(std::string_view raw_label_body);

/// As try_expand_range but throws Error(UnparsableBody).
LabelSet expand_range(std::string_view raw_label_body);

/// Finds label markers at segment-initial positions: the start of the
/// caption, after sentence-ending punctuation, or directly after another
/// marker ("(X)" and "X)" forms only). Results are in ascending offset order.
std::vector<LabelMarker> scan_labels(std::string_view caption);

/// Full parse: markers, segments, shared context and flags.
CaptionParse parse_caption(std::string_view caption);

/// Segments only. A caption without usable markers yields exactly one
/// unlabeled segment holding the trimmed caption.
std::vector<SubcaptionSegment> segment_caption(std::string_view caption);

}  // namespace figalign
