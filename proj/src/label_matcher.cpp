// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include "figalign/label_matcher.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "figalign/error.hpp"
#include "json_io.hpp"

namespace figalign {

namespace {

bool strippable(unsigned char c) {
  return c < 0x80 && (std::isspace(c) || std::ispunct(c));
}

template <typename Items, typename IdOf>
void require_single_figure(const Items& items, const std::string& expected, IdOf id_of) {
  for (const auto& item : items)
    if (id_of(item) != expected)
      throw Error(ErrorCode::MixedFigureIds, "inputs belong to several figures",
                  expected + "," + id_of(item));
}

}  // namespace

std::optional<char> normalize_token(const OcrToken& token, double min_confidence) {
  if (token.confidence < min_confidence) return std::nullopt;
  std::string_view s = token.text;
  while (!s.empty() && strippable(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && strippable(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.size() != 1) return std::nullopt;
  const char c = s.front();
  if (c >= 'a' && c <= 'z') return c;
  if (c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
  return std::nullopt;
}

std::vector<RegionLabelSet> assign_tokens(const std::vector<SubfigureRegion>& regions,
                                          const std::vector<OcrToken>& tokens,
                                          double min_confidence) {
  std::vector<RegionLabelSet> out;
  if (regions.empty()) return out;
  const std::string& fid = regions.front().figure_id;
  require_single_figure(regions, fid, [](const SubfigureRegion& r) { return r.figure_id; });
  require_single_figure(tokens, fid, [](const OcrToken& t) { return t.figure_id; });

  for (const auto& r : regions) out.push_back({r, {}});
  std::sort(out.begin(), out.end(), [](const RegionLabelSet& a, const RegionLabelSet& b) {
    return a.region.order_index < b.region.order_index;
  });

  for (const OcrToken& tok : tokens) {
    auto letter = normalize_token(tok, min_confidence);
    if (!letter) continue;
    const double cx = tok.box.center_x(), cy = tok.box.center_y();
    RegionLabelSet* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (auto& rls : out) {
      const BoundingBox& b = rls.region.box;
      if (!b.contains_point(cx, cy)) continue;
      const double d = std::hypot(cx - b.center_x(), cy - b.center_y());
      // `out` is in order_index order, so strict < keeps the lower index on ties.
      if (d < best_d) {
        best_d = d;
        best = &rls;
      }
    }
    if (best) best->candidate_labels.insert(*letter);
  }
  return out;
}

std::vector<AlignedPair> match_subfigures(const std::vector<RegionLabelSet>& label_sets,
                                          const std::vector<SubcaptionSegment>& segments,
                                          const std::string& full_caption) {
  if (label_sets.empty()) throw Error(ErrorCode::EmptyRegions, "no regions to match");
  const std::string& fid = label_sets.front().region.figure_id;
  require_single_figure(label_sets, fid,
                        [](const RegionLabelSet& r) { return r.region.figure_id; });

  LabelSet caption_labels;
  for (const auto& seg : segments)
    if (seg.label) caption_labels.insert(*seg.label);

  std::vector<const RegionLabelSet*> ordered;
  for (const auto& rls : label_sets) ordered.push_back(&rls);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return a->region.order_index < b->region.order_index;
  });

  std::vector<AlignedPair> out;
  if (ordered.size() == 1 && caption_labels.empty()) {
    out.push_back({fid + "#" + std::to_string(ordered.front()->region.order_index), fid,
                   std::nullopt, std::nullopt, full_caption, PairStatus::Singleton});
    return out;
  }

  for (const RegionLabelSet* rls : ordered) {
    AlignedPair p;
    p.pair_id = fid + "#" + std::to_string(rls->region.order_index);
    p.figure_id = fid;
    p.region = rls->region.box;
    const LabelSet hit = rls->candidate_labels & caption_labels;
    if (hit.size() == 1) {
      const char letter = *hit.front();
      auto seg = std::find_if(segments.begin(), segments.end(),
                              [&](const SubcaptionSegment& s) { return s.label == letter; });
      p.label = letter;
      p.text = seg->text;
      p.status = PairStatus::UniqueLabel;
    } else {
      p.text = full_caption;
      p.status = PairStatus::FallbackWholeCaption;
    }
    out.push_back(std::move(p));
  }
  return out;
}

int count_repeated_labels(const std::vector<AlignedPair>& pairs) {
  int repeats = 0;
  LabelSet seen;
  std::string current;
  for (const auto& p : pairs) {
    if (p.figure_id != current) {
      current = p.figure_id;
      seen = {};
    }
    if (p.status != PairStatus::UniqueLabel || !p.label) continue;
    if (seen.contains(*p.label)) ++repeats;
    seen.insert(*p.label);
  }
  return repeats;
}

// --- OCR interchange ---------------------------------------------------------

namespace {

using detail::Json;

int as_int(const Json& obj, const char* key) {
  long long v = detail::require_int(obj, key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw std::runtime_error(std::string("field \"") + key + "\" out of range");
  return static_cast<int>(v);
}

OcrToken token_from_json(const Json& t, const std::string& figure_id) {
  if (!t.is_object()) throw std::runtime_error("token must be an object");
  detail::check_keys(t, {"text", "x", "y", "w", "h", "confidence"});
  OcrToken tok;
  tok.figure_id = figure_id;
  tok.text = detail::require_string(t, "text");
  tok.box = {as_int(t, "x"), as_int(t, "y"), as_int(t, "w"), as_int(t, "h")};
  tok.confidence = detail::require_number(t, "confidence");
  if (tok.text.empty()) throw std::runtime_error("token text must be non-empty");
  if (tok.box.w <= 0 || tok.box.h <= 0) throw std::runtime_error("token box must have positive area");
  if (!(tok.confidence >= 0.0 && tok.confidence <= 1.0))
    throw std::runtime_error("confidence must be in [0,1]");
  return tok;
}

}  // namespace

OcrIndex parse_ocr(std::string_view text, std::string_view source) {
  OcrIndex out;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    OcrEntry e;
    e.line = line_no;
    Json obj;
    try {
      obj = detail::parse_object(line);
      e.figure_id = detail::require_string(obj, "figure_id");
    } catch (const std::runtime_error& err) {
      throw Error(ErrorCode::SchemaViolation, err.what(), std::string(source), line_no);
    }
    if (e.figure_id.empty())
      throw Error(ErrorCode::SchemaViolation, "figure_id must be non-empty", std::string(source),
                  line_no);
    try {
      detail::check_keys(obj, {"figure_id", "tokens"});
      for (const Json& t : detail::require_array(obj, "tokens"))
        e.tokens.push_back(token_from_json(t, e.figure_id));
    } catch (const std::runtime_error& err) {
      e.tokens.clear();
      e.error = err.what();
    }
    std::string id = e.figure_id;
    if (!out.emplace(id, std::move(e)).second)
      throw Error(ErrorCode::SchemaViolation, "figure_id \"" + id + "\" repeated",
                  std::string(source), line_no);
  });
  return out;
}

OcrIndex read_ocr(const std::filesystem::path& path) {
  return parse_ocr(detail::read_file(path), path.string());
}

std::string serialize_ocr(const std::vector<OcrEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    detail::OrderedJson o;
    o["figure_id"] = e.figure_id;
    o["tokens"] = detail::OrderedJson::array();
    for (const auto& t : e.tokens) {
      detail::OrderedJson j;
      j["text"] = t.text;
      j["x"] = t.box.x;
      j["y"] = t.box.y;
      j["w"] = t.box.w;
      j["h"] = t.box.h;
      j["confidence"] = t.confidence;
      o["tokens"].push_back(std::move(j));
    }
    out += detail::dump_line(o);
    out += '\n';
  }
  return out;
}

}  // namespace figalign
