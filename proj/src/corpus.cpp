// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include "figalign/corpus.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "figalign/error.hpp"
#include "figalign/label_set.hpp"
#include "json_io.hpp"

namespace figalign {

using detail::Json;
using detail::OrderedJson;

double intersection_over_union(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t ix = std::max(0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const std::int64_t iy = std::max(0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const std::int64_t inter = ix * iy;
  const std::int64_t uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::string_view to_string(PairStatus status) noexcept {
  switch (status) {
    case PairStatus::UniqueLabel: return "unique_label";
    case PairStatus::FallbackWholeCaption: return "fallback_whole_caption";
    case PairStatus::Singleton: return "singleton";
  }
  return "singleton";
}

std::optional<PairStatus> parse_pair_status(std::string_view text) noexcept {
  if (text == "unique_label") return PairStatus::UniqueLabel;
  if (text == "fallback_whole_caption") return PairStatus::FallbackWholeCaption;
  if (text == "singleton") return PairStatus::Singleton;
  return std::nullopt;
}

namespace {

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\n\r\f\v") == std::string_view::npos;
}

}  // namespace

std::vector<std::string> validate_record(const FigureRecord& record) {
  std::vector<std::string> out;
  if (record.figure_id.empty()) out.emplace_back("figure_id: must be non-empty");
  if (is_blank(record.caption)) out.emplace_back("caption: must be non-empty after trimming");
  return out;
}

std::optional<std::string> validate_pair(const AlignedPair& pair,
                                         std::string_view full_caption) {
  if (pair.pair_id.empty()) return "pair_id: must be non-empty";
  if (pair.region && !pair.region->valid()) return "bbox: requires w > 0, h > 0, x >= 0, y >= 0";
  if (pair.label && !LabelSet::is_letter(*pair.label)) return "label: must be a single lowercase letter";
  switch (pair.status) {
    case PairStatus::Singleton:
      if (pair.region) return "singleton pair must not carry a bbox";
      if (pair.text != full_caption) return "singleton pair text must equal the caption";
      break;
    case PairStatus::UniqueLabel:
      if (!pair.label) return "unique_label pair requires a label";
      if (pair.text.empty()) return "unique_label pair requires non-empty text";
      break;
    case PairStatus::FallbackWholeCaption:
      if (pair.label) return "fallback_whole_caption pair must not carry a label";
      if (pair.text != full_caption) return "fallback pair text must equal the caption";
      break;
  }
  return std::nullopt;
}

void normalize_order(CorpusManifest& manifest) {
  std::sort(manifest.records.begin(), manifest.records.end(),
            [](const FigureRecord& a, const FigureRecord& b) { return a.figure_id < b.figure_id; });
  auto key = [](const AlignedPair& p) {
    const bool has = p.region.has_value();
    const BoundingBox box = p.region.value_or(BoundingBox{});
    return std::make_tuple(std::cref(p.figure_id), has, box.x, box.y, box.w, box.h,
                           std::cref(p.pair_id));
  };
  std::sort(manifest.pairs.begin(), manifest.pairs.end(),
            [&](const AlignedPair& a, const AlignedPair& b) { return key(a) < key(b); });
}

namespace {

[[noreturn]] void malformed(std::string_view source, std::size_t line, const std::string& why) {
  throw Error(ErrorCode::MalformedLine, why, std::string(source), line);
}

FigureRecord record_from_json(const Json& obj) {
  detail::check_keys(obj, {"kind", "figure_id", "image_path", "caption", "journal", "year",
                           "article_type", "shared_context"});
  FigureRecord r;
  r.figure_id = detail::require_string(obj, "figure_id");
  r.image_path = detail::require_string(obj, "image_path");
  r.caption = detail::require_string(obj, "caption");
  r.journal = detail::optional_string(obj, "journal");
  if (auto y = detail::optional_int(obj, "year")) {
    if (*y < std::numeric_limits<int>::min() || *y > std::numeric_limits<int>::max())
      throw std::runtime_error("field \"year\" out of range");
    r.year = static_cast<int>(*y);
  }
  r.article_type = detail::optional_string(obj, "article_type");
  r.shared_context = detail::optional_string(obj, "shared_context");
  return r;
}

AlignedPair pair_from_json(const Json& obj) {
  detail::check_keys(obj, {"kind", "pair_id", "figure_id", "bbox", "label", "text", "status"});
  AlignedPair p;
  p.pair_id = detail::require_string(obj, "pair_id");
  p.figure_id = detail::require_string(obj, "figure_id");
  if (auto it = obj.find("bbox"); it != obj.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 4)
      throw std::runtime_error("field \"bbox\" must be [x,y,w,h]");
    int v[4];
    for (int i = 0; i < 4; ++i) {
      const Json& e = (*it)[i];
      if (!e.is_number_integer()) throw std::runtime_error("field \"bbox\" must hold integers");
      auto n = e.get<long long>();
      if (n < 0 || n > std::numeric_limits<int>::max())
        throw std::runtime_error("field \"bbox\" value out of range");
      v[i] = static_cast<int>(n);
    }
    p.region = BoundingBox{v[0], v[1], v[2], v[3]};
  }
  if (auto label = detail::optional_string(obj, "label")) {
    if (label->size() != 1) throw std::runtime_error("field \"label\" must be one letter");
    p.label = (*label)[0];
  }
  p.text = detail::require_string(obj, "text");
  const std::string status = detail::require_string(obj, "status");
  auto parsed = parse_pair_status(status);
  if (!parsed) throw std::runtime_error("unknown status \"" + status + "\"");
  p.status = *parsed;
  return p;
}

OrderedJson record_to_json(const FigureRecord& r) {
  OrderedJson o;
  o["kind"] = "record";
  o["figure_id"] = r.figure_id;
  o["image_path"] = r.image_path;
  o["caption"] = r.caption;
  if (r.journal) o["journal"] = *r.journal;
  if (r.year) o["year"] = *r.year;
  if (r.article_type) o["article_type"] = *r.article_type;
  if (r.shared_context) o["shared_context"] = *r.shared_context;
  return o;
}

OrderedJson pair_to_json(const AlignedPair& p) {
  OrderedJson o;
  o["kind"] = "pair";
  o["pair_id"] = p.pair_id;
  o["figure_id"] = p.figure_id;
  if (p.region) o["bbox"] = {p.region->x, p.region->y, p.region->w, p.region->h};
  if (p.label) o["label"] = std::string(1, *p.label);
  o["text"] = p.text;
  o["status"] = std::string(to_string(p.status));
  return o;
}

}  // namespace

CorpusManifest parse_manifest(std::string_view text, std::string_view source) {
  CorpusManifest m;
  std::vector<std::size_t> pair_lines;
  std::unordered_map<std::string, std::size_t> record_index;
  std::unordered_map<std::string, std::size_t> pair_ids;

  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    Json obj;
    std::string kind;
    try {
      obj = detail::parse_object(line);
      kind = detail::require_string(obj, "kind");
    } catch (const std::runtime_error& e) {
      malformed(source, line_no, e.what());
    }
    if (kind == "record") {
      FigureRecord r;
      try {
        r = record_from_json(obj);
      } catch (const std::runtime_error& e) {
        malformed(source, line_no, e.what());
      }
      if (auto v = validate_record(r); !v.empty()) malformed(source, line_no, v.front());
      if (!record_index.emplace(r.figure_id, m.records.size()).second)
        throw Error(ErrorCode::DuplicateId, "figure_id repeated", r.figure_id, line_no);
      m.records.push_back(std::move(r));
    } else if (kind == "pair") {
      AlignedPair p;
      try {
        p = pair_from_json(obj);
      } catch (const std::runtime_error& e) {
        malformed(source, line_no, e.what());
      }
      if (!pair_ids.emplace(p.pair_id, line_no).second)
        throw Error(ErrorCode::DuplicateId, "pair_id repeated", p.pair_id, line_no);
      m.pairs.push_back(std::move(p));
      pair_lines.push_back(line_no);
    } else {
      malformed(source, line_no, "unknown kind \"" + kind + "\"");
    }
  });

  for (std::size_t i = 0; i < m.pairs.size(); ++i) {
    const AlignedPair& p = m.pairs[i];
    auto it = record_index.find(p.figure_id);
    if (it == record_index.end())
      throw Error(ErrorCode::DanglingReference, "figure_id \"" + p.figure_id + "\" has no record",
                  p.pair_id, pair_lines[i]);
    if (auto why = validate_pair(p, m.records[it->second].caption))
      malformed(source, pair_lines[i], *why);
  }

  normalize_order(m);
  return m;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(detail::read_file(path), path.string());
}

std::string serialize_manifest(const CorpusManifest& manifest) {
  CorpusManifest sorted = manifest;
  normalize_order(sorted);
  std::string out;
  for (const auto& r : sorted.records) {
    out += detail::dump_line(record_to_json(r));
    out += '\n';
  }
  for (const auto& p : sorted.pairs) {
    out += detail::dump_line(pair_to_json(p));
    out += '\n';
  }
  return out;
}

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  detail::write_file(path, serialize_manifest(manifest));
}

}  // namespace figalign
