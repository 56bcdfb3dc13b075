// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "figalign/caption_parser.hpp"

namespace figalign::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static int counter = 0;
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("figalign-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// --- retrieval -----------------------------------------------------------------

double recall_full_sort_oracle(const Matrix& sim, std::size_t k, Direction direction) {
  const std::size_t n = sim.rows();
  std::size_t hits = 0;
  for (std::size_t q = 0; q < n; ++q) {
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t c = 0; c < n; ++c) {
      const double s = direction == Direction::ImageToText ? sim(q, c) : sim(c, q);
      ranked.emplace_back(s, c);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t pos = 0; pos < k; ++pos)
      if (ranked[pos].second == q) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(n);
}

double cosine_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::vector<double>> random_rows(Rng& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> rows(n, std::vector<double>(dim));
  for (auto& r : rows)
    for (auto& v : r) v = g(rng);
  return rows;
}

// --- captions ------------------------------------------------------------------

std::vector<GoldenCase> load_parser_golden(const fs::path& path) {
  std::vector<GoldenCase> out;
  std::istringstream in(read_text(path));
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    GoldenCase c;
    c.name = j.at("name").get<std::string>();
    c.caption = j.at("caption").get<std::string>();
    for (const auto& seg : j.at("segments")) {
      std::optional<char> label;
      if (seg.contains("label")) label = seg.at("label").get<std::string>().at(0);
      c.segments.emplace_back(label, seg.at("text").get<std::string>());
    }
    for (const auto& f : j.at("flags")) {
      c.duplicate_label |= f == "duplicate_label";
      c.empty_segment |= f == "empty_segment";
    }
    c.shared_context = j.at("shared_context").get<std::string>();
    out.push_back(std::move(c));
  }
  return out;
}

std::string golden_mismatch(const GoldenCase& c) {
  const auto parse = parse_caption(c.caption);
  if (parse.segments.size() != c.segments.size())
    return "segment count " + std::to_string(parse.segments.size()) + " != " +
           std::to_string(c.segments.size());
  for (std::size_t i = 0; i < c.segments.size(); ++i) {
    const auto& got = parse.segments[i];
    if (got.label != c.segments[i].first)
      return "label of segment " + std::to_string(i);
    if (got.text != c.segments[i].second)
      return "text of segment " + std::to_string(i) + ": \"" + got.text + "\"";
  }
  if (parse.duplicate_label != c.duplicate_label) return "duplicate_label flag";
  if (parse.empty_segment != c.empty_segment) return "empty_segment flag";
  if (parse.shared_context != c.shared_context)
    return "shared_context \"" + parse.shared_context + "\"";
  return {};
}

// --- matching rule ---------------------------------------------------------------

RuleOutcome matching_rule_oracle(std::uint32_t candidate_mask, std::uint32_t caption_mask,
                                 std::size_t region_count) {
  if (region_count == 1 && caption_mask == 0) return {PairStatus::Singleton, std::nullopt};
  int shared = 0;
  char letter = 0;
  for (int i = 0; i < 26; ++i) {
    const bool in_region = (candidate_mask >> i) & 1u;
    const bool in_caption = (caption_mask >> i) & 1u;
    if (in_region && in_caption) {
      ++shared;
      letter = static_cast<char>('a' + i);
    }
  }
  if (shared == 1) return {PairStatus::UniqueLabel, letter};
  return {PairStatus::FallbackWholeCaption, std::nullopt};
}

// --- geometry ----------------------------------------------------------------------

double iou_pixel_oracle(const BoundingBox& a, const BoundingBox& b) {
  const int x0 = std::min(a.x, b.x), y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.x + a.w, b.x + b.w), y1 = std::max(a.y + a.h, b.y + b.h);
  long inter = 0, uni = 0;
  for (int y = y0; y < y1; ++y) {
    const bool ya = y >= a.y && y < a.y + a.h;
    const bool yb = y >= b.y && y < b.y + b.h;
    for (int x = x0; x < x1; ++x) {
      const bool ia = ya && x >= a.x && x < a.x + a.w;
      const bool ib = yb && x >= b.x && x < b.x + b.w;
      inter += ia && ib;
      uni += ia || ib;
    }
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

GridCase make_grid(Rng& rng, const GridSpec& layout) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::vector<int> widths(layout.cols), heights(layout.rows);
  for (auto& w : widths) w = pick(layout.min_panel, layout.max_panel);
  for (auto& h : heights) h = pick(layout.min_panel, layout.max_panel);
  std::vector<int> xs(layout.cols), ys(layout.rows);
  int x = pick(0, layout.max_margin);
  for (int c = 0; c < layout.cols; ++c) {
    xs[c] = x;
    x += widths[c] + (c + 1 < layout.cols ? pick(layout.min_gutter, layout.max_gutter) : 0);
  }
  int y = pick(0, layout.max_margin);
  for (int r = 0; r < layout.rows; ++r) {
    ys[r] = y;
    y += heights[r] + (r + 1 < layout.rows ? pick(layout.min_gutter, layout.max_gutter) : 0);
  }
  const int width = x + pick(0, layout.max_margin);
  const int height = y + pick(0, layout.max_margin);

  GridCase g{GrayImage(width, height, 255), {}, layout.rows, layout.cols};
  std::uniform_int_distribution<int> dark(0, 200);
  std::bernoulli_distribution hole(0.05);
  for (int r = 0; r < layout.rows; ++r) {
    for (int c = 0; c < layout.cols; ++c) {
      const BoundingBox box{xs[c], ys[r], widths[c], heights[r]};
      g.truth.push_back(box);
      for (int py = box.y; py < box.bottom(); ++py) {
        for (int px = box.x; px < box.right(); ++px) {
          const bool edge = px == box.x || py == box.y;
          g.image.at(px, py) = static_cast<std::uint8_t>(
              layout.speckle && !edge && hole(rng) ? 255 : dark(rng));
        }
      }
    }
  }
  return g;
}

// --- corpora -------------------------------------------------------------------------

namespace {

enum class Scenario { Match, NoToken, ForeignLetter, TwoLetters, LowConfidence, OutsideToken };

std::string upper(char c) { return std::string(1, static_cast<char>(c - 'a' + 'A')); }

}  // namespace

SyntheticCorpus make_synthetic_corpus(std::uint64_t seed, int figures, int compound) {
  Rng rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  std::vector<int> order(figures);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> is_compound(figures, false);
  for (int i = 0; i < compound; ++i) is_compound[order[i]] = true;

  static const char* kFindings[] = {"glioma",   "meningioma", "hemorrhage",    "infarct",
                                    "aneurysm", "edema",      "abscess",       "cavernoma",
                                    "hydrocephalus", "metastasis"};
  static const char* kModalities[] = {"Axial T2-weighted MRI", "Coronal FLAIR", "Sagittal T1",
                                      "CT angiography", "Digital subtraction angiography",
                                      "Diffusion-weighted image", "Intraoperative photograph"};

  SyntheticCorpus corpus;
  corpus.compound = compound;
  for (int i = 0; i < figures; ++i) {
    char id_buf[16];
    std::snprintf(id_buf, sizeof id_buf, "fig%04d", i);
    const std::string fid = id_buf;
    FigureRecord rec;
    rec.figure_id = fid;
    rec.image_path = fid + ".png";
    rec.journal = "Brain Tumor Research and Treatment";
    rec.year = 1990 + i % 29;
    rec.article_type = "case report";
    const std::string finding = kFindings[pick(0, 9)];
    const int width = pick(300, 900), height = pick(300, 900);

    if (!is_compound[i]) {
      const bool labeled = chance(0.2);
      rec.caption = labeled ? "(A) " + std::string(kModalities[pick(0, 6)]) +
                                  " of the brain showing " + finding + "."
                            : std::string(kModalities[pick(0, 6)]) + " of the brain showing " +
                                  finding + " in case " + std::to_string(i) + ".";
      const int mode = pick(0, 2);
      if (mode != 2) {
        DetectionEntry e{fid, width, height, {}, 0};
        if (mode == 0) e.regions.push_back({{10, 10, width - 20, height - 20}, 0.9});
        else e.regions.push_back({{0, 0, width / 2, height / 2}, 0.3});  // under min_score
        corpus.detections.push_back(e);
      }
      corpus.expected[fid + "#0"] = {PairStatus::Singleton, rec.caption, std::nullopt};
      corpus.records.push_back(rec);
      continue;
    }

    const int regions = pick(2, 4);
    const bool labeled_caption = !chance(0.1);
    std::vector<std::string> texts;
    std::string caption = chance(0.3) ? "Case " + std::to_string(i) + ". " : "";
    for (int r = 0; r < regions; ++r) {
      texts.push_back(std::string(kModalities[(i + r) % 7]) + " demonstrating " + finding +
                      " in view " + std::to_string(r + 1) + ".");
      if (labeled_caption) caption += "(" + upper(static_cast<char>('a' + r)) + ") ";
      caption += texts.back();
      if (r + 1 < regions) caption += " ";
    }
    rec.caption = caption;

    // Panels side by side in one row, reading order = left to right.
    DetectionEntry e{fid, width, height, {}, 0};
    const int panel_w = (width - 10 * (regions + 1)) / regions;
    std::vector<BoundingBox> boxes;
    for (int r = 0; r < regions; ++r)
      boxes.push_back({10 + r * (panel_w + 10), 20, panel_w, height - 40});
    // Emit in scrambled order; ingestion must restore reading order.
    std::vector<int> emit(regions);
    std::iota(emit.begin(), emit.end(), 0);
    std::shuffle(emit.begin(), emit.end(), rng);
    for (int r : emit) e.regions.push_back({boxes[r], 0.5 + 0.1 * pick(0, 4)});
    if (chance(0.3)) e.regions.push_back({{0, 0, 15, 15}, 0.1});  // noise under threshold
    corpus.detections.push_back(e);

    OcrEntry ocr{fid, {}, 0, std::nullopt};
    auto token = [&](const std::string& text, const BoundingBox& panel, double conf) {
      ocr.tokens.push_back({fid, text, {panel.x + 4, panel.y + 4, 12, 14}, conf});
    };
    for (int r = 0; r < regions; ++r) {
      const char letter = static_cast<char>('a' + r);
      const std::string pid = fid + "#" + std::to_string(r);
      if (chance(0.3)) token("MRI", boxes[r], 0.99);  // never a label
      Scenario s = static_cast<Scenario>(chance(0.6) ? 0 : pick(1, 5));
      switch (s) {
        case Scenario::Match:
          token(chance(0.5) ? upper(letter) : "(" + std::string(1, letter) + ")", boxes[r], 0.95);
          break;
        case Scenario::NoToken:
          break;
        case Scenario::ForeignLetter:
          token("Z", boxes[r], 0.9);
          break;
        case Scenario::TwoLetters:
          token(upper(letter), boxes[r], 0.9);
          token(upper(static_cast<char>('a' + (r + 1) % regions)),
                {boxes[r].x + 30, boxes[r].y, 40, 40}, 0.9);
          break;
        case Scenario::LowConfidence:
          token(upper(letter), boxes[r], 0.2);
          break;
        case Scenario::OutsideToken:
          ocr.tokens.push_back({fid, upper(letter), {boxes[r].x, 0, 10, 10}, 0.9});
          break;
      }
      const bool unique = labeled_caption && s == Scenario::Match;
      corpus.expected[pid] = unique ? ExpectedPair{PairStatus::UniqueLabel, texts[r], letter}
                                    : ExpectedPair{PairStatus::FallbackWholeCaption, caption,
                                                   std::nullopt};
    }
    corpus.ocr.push_back(ocr);
    corpus.records.push_back(rec);
  }
  return corpus;
}

CorpusFiles write_corpus(const SyntheticCorpus& corpus, const fs::path& dir) {
  CorpusFiles f{dir / "records.jsonl", dir / "detections.jsonl", dir / "ocr.jsonl"};
  CorpusManifest m;
  m.records = corpus.records;
  save_manifest(m, f.manifest);
  write_detections(corpus.detections, f.detections);
  write_text(f.ocr, serialize_ocr(corpus.ocr));
  return f;
}

CorpusManifest random_manifest(Rng& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  static const char* kWords[] = {"brain", "MRI", "lésion", "脑", "\"quoted\"", "tab\there",
                                 "line\nbreak", "(A)", "back\\slash", "κ"};
  auto text = [&](int words) {
    std::string s;
    for (int w = 0; w < words; ++w) s += (w ? " " : "") + std::string(kWords[pick(0, 9)]);
    return s;
  };

  CorpusManifest m;
  const int n = pick(0, 12);
  for (int i = 0; i < n; ++i) {
    FigureRecord r;
    r.figure_id = "f" + std::to_string(pick(0, 999999)) + "_" + std::to_string(i);
    r.image_path = "img/" + r.figure_id + ".png";
    r.caption = text(pick(1, 8));
    if (chance(0.5)) r.journal = text(2);
    if (chance(0.5)) r.year = pick(1937, 2018);
    if (chance(0.3)) r.article_type = "case report";
    if (chance(0.2)) r.shared_context = text(2);
    const int pairs = pick(0, 4);
    for (int p = 0; p < pairs; ++p) {
      AlignedPair a;
      a.pair_id = r.figure_id + "#" + std::to_string(p);
      a.figure_id = r.figure_id;
      const int kind = pairs == 1 ? pick(0, 2) : pick(1, 2);
      if (kind == 0) {
        a.status = PairStatus::Singleton;
        a.text = r.caption;
      } else {
        a.region = BoundingBox{pick(0, 500), pick(0, 500), pick(1, 300), pick(1, 300)};
        if (kind == 1) {
          a.status = PairStatus::FallbackWholeCaption;
          a.text = r.caption;
        } else {
          a.status = PairStatus::UniqueLabel;
          a.label = static_cast<char>('a' + pick(0, 25));
          a.text = text(pick(1, 5));
        }
      }
      m.pairs.push_back(std::move(a));
    }
    m.records.push_back(std::move(r));
  }
  std::shuffle(m.records.begin(), m.records.end(), rng);
  std::shuffle(m.pairs.begin(), m.pairs.end(), rng);
  return m;
}

CorpusManifest counted_manifest(int records, int pairs, int compound) {
  const int singles = records - compound;
  const int compound_pairs = pairs - singles;
  if (compound <= 0 || compound_pairs < 2 * compound)
    throw std::invalid_argument("counts leave compound figures with fewer than two pairs");
  const int extra = compound_pairs - 2 * compound;
  CorpusManifest m;
  for (int i = 0; i < records; ++i) {
    FigureRecord r;
    r.figure_id = "pm" + std::to_string(100000 + i);
    r.image_path = r.figure_id + ".jpg";
    r.caption = "Brain MRI, case " + std::to_string(i) + ".";
    const bool comp = i < compound;
    int n = comp ? 2 + (extra / compound) + (i < extra % compound ? 1 : 0) : 1;
    for (int p = 0; p < n; ++p) {
      AlignedPair a;
      a.pair_id = r.figure_id + "#" + std::to_string(p);
      a.figure_id = r.figure_id;
      a.text = r.caption;
      if (comp) {
        a.region = BoundingBox{p * 100, 0, 90, 90};
        a.status = PairStatus::FallbackWholeCaption;
      } else {
        a.status = PairStatus::Singleton;
      }
      m.pairs.push_back(std::move(a));
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

}  // namespace figalign::testing
