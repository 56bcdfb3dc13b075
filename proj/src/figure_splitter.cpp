// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include "figalign/figure_splitter.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

#include "figalign/error.hpp"
#include "json_io.hpp"

namespace figalign {

void SplitterParams::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, what);
  };
  check(white_threshold >= 0 && white_threshold <= 255, "white_threshold must be in [0,255]");
  check(min_gutter_px >= 1, "min_gutter_px must be >= 1");
  check(min_panel_px >= 1, "min_panel_px must be >= 1");
  check(max_recursion_depth >= 0, "max_recursion_depth must be >= 0");
}

namespace {

/// Summed-area table over the "ink" (non-background) mask.
class InkIntegral {
 public:
  InkIntegral(const GrayImage& image, int white_threshold)
      : w_(image.width()), h_(image.height()),
        sums_(static_cast<std::size_t>(w_ + 1) * (h_ + 1), 0) {
    for (int y = 0; y < h_; ++y) {
      auto row = image.row(y);
      std::int32_t run = 0;
      for (int x = 0; x < w_; ++x) {
        run += row[x] < white_threshold ? 1 : 0;
        at(x + 1, y + 1) = at(x + 1, y) + run;
      }
    }
  }

  /// Ink pixels in [x0,x1) x [y0,y1).
  std::int32_t count(int x0, int y0, int x1, int y1) const {
    return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
  }

  /// Bounding box of the ink inside `r`, if any.
  std::optional<BoundingBox> tighten(const BoundingBox& r) const {
    if (count(r.x, r.y, r.right(), r.bottom()) == 0) return std::nullopt;
    int x0 = r.x, x1 = r.right(), y0 = r.y, y1 = r.bottom();
    while (count(x0, y0, x0 + 1, y1) == 0) ++x0;
    while (count(x1 - 1, y0, x1, y1) == 0) --x1;
    while (count(x0, y0, x1, y0 + 1) == 0) ++y0;
    while (count(x0, y1 - 1, x1, y1) == 0) --y1;
    return BoundingBox{x0, y0, x1 - x0, y1 - y0};
  }

 private:
  std::int32_t& at(int x, int y) { return sums_[static_cast<std::size_t>(y) * (w_ + 1) + x]; }
  std::int32_t at(int x, int y) const {
    return sums_[static_cast<std::size_t>(y) * (w_ + 1) + x];
  }

  int w_, h_;
  std::vector<std::int32_t> sums_;
};

struct Gutter {
  int length;
  bool vertical;
  int start;
};

class GutterSplitter {
 public:
  GutterSplitter(const GrayImage& image, const SplitterParams& params)
      : ink_(image, params.white_threshold), params_(params) {}

  void split(const BoundingBox& area, int depth, std::vector<BoundingBox>& leaves) const {
    auto tight = ink_.tighten(area);
    if (!tight) return;
    const BoundingBox t = *tight;
    if (depth < params_.max_recursion_depth) {
      for (const Gutter& g : gutters(t)) {
        const int cut = g.start + g.length / 2;
        BoundingBox a = t, b = t;
        if (g.vertical) {
          a.w = cut - t.x;
          b.x = cut;
          b.w = t.right() - cut;
        } else {
          a.h = cut - t.y;
          b.y = cut;
          b.h = t.bottom() - cut;
        }
        auto ta = ink_.tighten(a), tb = ink_.tighten(b);
        if (ta && tb && panel_sized(*ta) && panel_sized(*tb)) {
          split(*ta, depth + 1, leaves);
          split(*tb, depth + 1, leaves);
          return;
        }
      }
    }
    leaves.push_back(t);
  }

 private:
  bool panel_sized(const BoundingBox& b) const {
    return b.w >= params_.min_panel_px && b.h >= params_.min_panel_px;
  }

  /// Background runs inside a tight box, best candidate first.
  std::vector<Gutter> gutters(const BoundingBox& t) const {
    std::vector<Gutter> out;
    auto collect = [&](bool vertical, int lo, int hi, auto&& empty_line) {
      int run_start = -1;
      for (int i = lo; i <= hi; ++i) {
        const bool empty = i < hi && empty_line(i);
        if (empty && run_start < 0) run_start = i;
        if (!empty && run_start >= 0) {
          if (i - run_start >= params_.min_gutter_px) out.push_back({i - run_start, vertical, run_start});
          run_start = -1;
        }
      }
    };
    collect(true, t.x, t.right(),
            [&](int x) { return ink_.count(x, t.y, x + 1, t.bottom()) == 0; });
    collect(false, t.y, t.bottom(),
            [&](int y) { return ink_.count(t.x, y, t.right(), y + 1) == 0; });
    std::sort(out.begin(), out.end(), [](const Gutter& a, const Gutter& b) {
      if (a.length != b.length) return a.length > b.length;
      if (a.vertical != b.vertical) return a.vertical;
      return a.start < b.start;
    });
    return out;
  }

  InkIntegral ink_;
  const SplitterParams& params_;
};

}  // namespace

void assign_reading_order(std::vector<SubfigureRegion>& regions) {
  std::stable_sort(regions.begin(), regions.end(),
                   [](const SubfigureRegion& a, const SubfigureRegion& b) {
                     return std::tie(a.box.y, a.box.x) < std::tie(b.box.y, b.box.x);
                   });
  for (std::size_t i = 0; i < regions.size(); ++i) regions[i].order_index = static_cast<int>(i);
}

std::vector<SubfigureRegion> split_compound(const GrayImage& image, const SplitterParams& params,
                                            const std::string& figure_id) {
  params.validate();
  if (image.empty()) throw std::invalid_argument("split_compound: empty image");
  const BoundingBox full{0, 0, image.width(), image.height()};
  std::vector<BoundingBox> leaves;
  GutterSplitter(image, params).split(full, 0, leaves);
  if (leaves.empty()) leaves.push_back(full);

  std::vector<SubfigureRegion> regions;
  regions.reserve(leaves.size());
  for (const auto& box : leaves) regions.push_back({figure_id, box, 1.0, 0});
  assign_reading_order(regions);
  return regions;
}

bool is_compound(const std::vector<SubfigureRegion>& regions) {
  for (const auto& r : regions)
    if (r.figure_id != regions.front().figure_id)
      throw Error(ErrorCode::MixedFigureIds, "regions belong to several figures",
                  regions.front().figure_id + "," + r.figure_id);
  return regions.size() >= 2;
}

// --- detections interchange -------------------------------------------------

namespace {

using detail::Json;

[[noreturn]] void schema(std::string_view source, std::size_t line, const std::string& why) {
  throw Error(ErrorCode::SchemaViolation, why, std::string(source), line);
}

int as_int(const Json& obj, const char* key) {
  long long v = detail::require_int(obj, key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw std::runtime_error(std::string("field \"") + key + "\" out of range");
  return static_cast<int>(v);
}

}  // namespace

std::vector<DetectionEntry> parse_detections(std::string_view text, std::string_view source) {
  std::vector<DetectionEntry> out;
  std::set<std::string, std::less<>> seen;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    DetectionEntry e;
    e.line = line_no;
    try {
      Json obj = detail::parse_object(line);
      detail::check_keys(obj, {"figure_id", "image_width", "image_height", "regions"});
      e.figure_id = detail::require_string(obj, "figure_id");
      e.image_width = as_int(obj, "image_width");
      e.image_height = as_int(obj, "image_height");
      if (e.image_width < 1 || e.image_height < 1)
        throw std::runtime_error("image dimensions must be >= 1");
      for (const Json& r : detail::require_array(obj, "regions")) {
        if (!r.is_object()) throw std::runtime_error("region must be an object");
        detail::check_keys(r, {"x", "y", "w", "h", "score"});
        RawDetection d;
        d.box = {as_int(r, "x"), as_int(r, "y"), as_int(r, "w"), as_int(r, "h")};
        d.score = detail::require_number(r, "score");
        if (d.box.w <= 0 || d.box.h <= 0) throw std::runtime_error("region w and h must be > 0");
        if (!(d.score >= 0.0 && d.score <= 1.0)) throw std::runtime_error("score must be in [0,1]");
        e.regions.push_back(d);
      }
    } catch (const std::runtime_error& err) {
      schema(source, line_no, err.what());
    }
    if (e.figure_id.empty()) schema(source, line_no, "figure_id must be non-empty");
    if (!seen.insert(e.figure_id).second)
      schema(source, line_no, "figure_id \"" + e.figure_id + "\" repeated");
    out.push_back(std::move(e));
  });
  return out;
}

std::vector<DetectionEntry> read_detections(const std::filesystem::path& path) {
  return parse_detections(detail::read_file(path), path.string());
}

std::string serialize_detections(const std::vector<DetectionEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    detail::OrderedJson o;
    o["figure_id"] = e.figure_id;
    o["image_width"] = e.image_width;
    o["image_height"] = e.image_height;
    o["regions"] = detail::OrderedJson::array();
    for (const auto& r : e.regions) {
      detail::OrderedJson j;
      j["x"] = r.box.x;
      j["y"] = r.box.y;
      j["w"] = r.box.w;
      j["h"] = r.box.h;
      j["score"] = r.score;
      o["regions"].push_back(std::move(j));
    }
    out += detail::dump_line(o);
    out += '\n';
  }
  return out;
}

void write_detections(const std::vector<DetectionEntry>& entries,
                      const std::filesystem::path& path) {
  detail::write_file(path, serialize_detections(entries));
}

DetectionEntry to_detection_entry(const std::string& figure_id, int width, int height,
                                  const std::vector<SubfigureRegion>& regions) {
  DetectionEntry e{figure_id, width, height, {}, 0};
  for (const auto& r : regions) e.regions.push_back({r.box, r.score});
  return e;
}

std::vector<SubfigureRegion> regions_from_entry(const DetectionEntry& entry,
                                                std::pair<int, int> dims, double min_score,
                                                IngestCounters* counters) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < entry.regions.size(); ++i) {
    const RawDetection& d = entry.regions[i];
    if (!d.box.valid() || !d.box.inside(dims.first, dims.second)) {
      const auto& b = d.box;
      throw Error(ErrorCode::OutOfBounds,
                  "box [" + std::to_string(b.x) + "," + std::to_string(b.y) + "," +
                      std::to_string(b.w) + "," + std::to_string(b.h) + "] exceeds " +
                      std::to_string(dims.first) + "x" + std::to_string(dims.second),
                  entry.figure_id, entry.line);
    }
    if (d.score < min_score) {
      if (counters) ++counters->below_min_score;
      continue;
    }
    order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entry.regions[a].score > entry.regions[b].score;
  });

  std::vector<SubfigureRegion> kept;
  for (std::size_t i : order) {
    const RawDetection& d = entry.regions[i];
    bool clash = std::any_of(kept.begin(), kept.end(), [&](const SubfigureRegion& k) {
      return intersection_over_union(k.box, d.box) > kMaxDetectionOverlap;
    });
    if (clash) {
      if (counters) ++counters->overlap_rejected;
      continue;
    }
    kept.push_back({entry.figure_id, d.box, d.score, 0});
  }
  assign_reading_order(kept);
  return kept;
}

std::vector<SubfigureRegion> ingest_detections(const std::filesystem::path& detections_file,
                                               const ImageDims& image_dims, double min_score,
                                               IngestCounters* counters) {
  std::vector<SubfigureRegion> out;
  for (const DetectionEntry& e : read_detections(detections_file)) {
    auto it = image_dims.find(e.figure_id);
    if (it == image_dims.end())
      throw Error(ErrorCode::UnknownFigure, "no image dimensions known", e.figure_id, e.line);
    if (it->second != std::pair{e.image_width, e.image_height})
      throw Error(ErrorCode::SchemaViolation, "declared image size disagrees with the image",
                  e.figure_id, e.line);
    auto regions = regions_from_entry(e, it->second, min_score, counters);
    out.insert(out.end(), regions.begin(), regions.end());
  }
  return out;
}

}  // namespace figalign
