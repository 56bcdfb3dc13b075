// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include "figalign/caption_parser.hpp"

#include "figalign/error.hpp"

namespace figalign {

namespace {

constexpr std::size_t kMaxRangeLetters = 8;
constexpr std::string_view kEnDash = "\xE2\x80\x93";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
char fold(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }
bool is_sentence_end(char c) {
  return c == '.' || c == '!' || c == '?' || c == ';' || c == ':';
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

/// Length of a range separator at `pos`, or 0.
std::size_t range_sep_len(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return 0;
  if (s[pos] == '-' || s[pos] == '~') return 1;
  if (s.substr(pos, kEnDash.size()) == kEnDash) return kEnDash.size();
  return 0;
}

std::size_t skip_spaces(std::string_view s, std::size_t pos) {
  while (pos < s.size() && is_space(s[pos])) ++pos;
  return pos;
}

/// Matches one list item at `pos`: a lone letter or "x<sep>y". Returns the
/// end offset or npos.
std::size_t match_item(std::string_view s, std::size_t pos) {
  if (pos >= s.size() || !is_alpha(s[pos])) return std::string_view::npos;
  std::size_t end = pos + 1;
  if (end < s.size() && is_alpha(s[end])) return std::string_view::npos;
  std::size_t p = skip_spaces(s, end);
  if (std::size_t sep = range_sep_len(s, p)) {
    std::size_t q = skip_spaces(s, p + sep);
    if (q < s.size() && is_alpha(s[q]) && (q + 1 >= s.size() || !is_alpha(s[q + 1])))
      return q + 1;
  }
  return end;
}

/// Matches the longest comma/ampersand list of items at `pos`.
std::size_t match_list(std::string_view s, std::size_t pos) {
  std::size_t end = match_item(s, pos);
  if (end == std::string_view::npos) return end;
  for (;;) {
    std::size_t p = skip_spaces(s, end);
    if (p < s.size() && (s[p] == ',' || s[p] == '&')) {
      std::size_t next = match_item(s, skip_spaces(s, p + 1));
      if (next == std::string_view::npos) return end;
      end = next;
    } else {
      return end;
    }
  }
}

struct Candidate {
  std::size_t end = 0;  // marker end
  LabelSet letters;
  bool parenthesized = false;
  bool dotted = false;  // "X." or "X:"
};

/// Tries every marker form at `pos`, ignoring position constraints.
std::optional<Candidate> match_marker(std::string_view s, std::size_t pos) {
  if (s[pos] == '(') {
    std::size_t body_begin = skip_spaces(s, pos + 1);
    std::size_t body_end = match_list(s, body_begin);
    if (body_end == std::string_view::npos) return std::nullopt;
    std::size_t close = skip_spaces(s, body_end);
    if (close >= s.size() || s[close] != ')') return std::nullopt;
    auto letters = try_expand_range(s.substr(body_begin, body_end - body_begin));
    if (!letters) return std::nullopt;
    return Candidate{close + 1, *letters, true, false};
  }
  if (!is_alpha(s[pos])) return std::nullopt;
  std::size_t body_end = match_list(s, pos);
  if (body_end == std::string_view::npos || body_end >= s.size()) return std::nullopt;
  const char term = s[body_end];
  if (term != ')' && term != '.' && term != ':') return std::nullopt;
  if (term != ')' && body_end + 1 < s.size() && !is_space(s[body_end + 1])) return std::nullopt;
  auto letters = try_expand_range(s.substr(pos, body_end - pos));
  if (!letters) return std::nullopt;
  return Candidate{body_end + 1, *letters, false, term != ')'};
}

}  // namespace

LabelSet CaptionParse::labels() const {
  LabelSet out;
  for (const auto& seg : segments)
    if (seg.label) out.insert(*seg.label);
  return out;
}

std::optional<LabelSet> try_expand_range(std::string_view raw) {
  LabelSet out;
  std::string_view rest = trim(raw);
  if (rest.empty()) return std::nullopt;
  for (;;) {
    std::size_t cut = rest.find_first_of(",&");
    std::string_view item = trim(rest.substr(0, cut));
    if (item.empty() || !is_alpha(item[0])) return std::nullopt;
    if (item.size() == 1) {
      out.insert(fold(item[0]));
    } else {
      std::size_t p = skip_spaces(item, 1);
      std::size_t sep = range_sep_len(item, p);
      if (sep == 0) return std::nullopt;
      std::size_t q = skip_spaces(item, p + sep);
      if (q + 1 != item.size() || !is_alpha(item[q])) return std::nullopt;
      const char lo = fold(item[0]);
      const char hi = fold(item[q]);
      if (hi <= lo || static_cast<std::size_t>(hi - lo + 1) > kMaxRangeLetters) return std::nullopt;
      for (char c = lo; c <= hi; ++c) out.insert(c);
    }
    if (cut == std::string_view::npos) break;
    rest = rest.substr(cut + 1);
  }
  return out;
}

LabelSet expand_range(std::string_view raw_label_body) {
  if (auto s = try_expand_range(raw_label_body)) return *s;
  throw Error(ErrorCode::UnparsableBody, "not a label body", std::string(raw_label_body));
}

namespace {

std::vector<LabelMarker> scan_impl(std::string_view caption, int* inline_rejections) {
  std::vector<LabelMarker> out;
  std::size_t prev_end = 0;
  bool have_prev = false;
  std::size_t pos = 0;
  while (pos < caption.size()) {
    const char c = caption[pos];
    if (c != '(' && !is_alpha(c)) {
      ++pos;
      continue;
    }
    // Unparenthesized forms may only start a word.
    if (c != '(' && pos > 0 && (is_alpha(caption[pos - 1]) || caption[pos - 1] == '(')) {
      ++pos;
      continue;
    }
    auto cand = match_marker(caption, pos);
    if (!cand) {
      ++pos;
      continue;
    }
    std::size_t j = pos;
    while (j > 0 && is_space(caption[j - 1])) --j;
    bool boundary = false;
    if (j == 0 || (have_prev && j == prev_end && !cand->dotted)) {
      boundary = true;
    } else if (is_sentence_end(caption[j - 1])) {
      boundary = cand->parenthesized || j < pos;
    }
    if (!boundary) {
      if (cand->parenthesized && inline_rejections) ++*inline_rejections;
      ++pos;
      continue;
    }
    out.push_back(LabelMarker{pos, cand->end - pos, cand->letters});
    prev_end = cand->end;
    have_prev = true;
    pos = cand->end;
  }
  return out;
}

}  // namespace

std::vector<LabelMarker> scan_labels(std::string_view caption) {
  return scan_impl(caption, nullptr);
}

CaptionParse parse_caption(std::string_view caption) {
  CaptionParse result;
  result.markers = scan_impl(caption, &result.inline_rejections);

  auto whole = [&] {
    std::string_view t = trim(caption);
    const std::size_t start = t.empty() ? 0 : static_cast<std::size_t>(t.data() - caption.data());
    result.segments.clear();
    result.shared_context.clear();
    if (!t.empty()) result.segments.push_back({std::nullopt, std::string(t), start, start + t.size()});
  };

  if (result.markers.empty()) {
    whole();
    return result;
  }

  LabelSet seen;
  for (const auto& m : result.markers) {
    if (!(seen & m.letters).empty()) result.duplicate_label = true;
    seen = seen | m.letters;
  }
  if (result.duplicate_label) {
    whole();
    return result;
  }

  result.shared_context = std::string(trim(caption.substr(0, result.markers.front().byte_offset)));
  for (std::size_t i = 0; i < result.markers.size(); ++i) {
    const auto& m = result.markers[i];
    const std::size_t stop =
        i + 1 < result.markers.size() ? result.markers[i + 1].byte_offset : caption.size();
    std::string_view raw = caption.substr(m.end(), stop - m.end());
    std::string_view text = trim(raw);
    if (text.empty()) {
      result.empty_segment = true;
      continue;
    }
    const std::size_t start = static_cast<std::size_t>(text.data() - caption.data());
    for (char letter : m.letters.letters())
      result.segments.push_back({letter, std::string(text), start, start + text.size()});
  }
  if (result.segments.empty()) whole();
  return result;
}

std::vector<SubcaptionSegment> segment_caption(std::string_view caption) {
  return parse_caption(caption).segments;
}

}  // namespace figalign
