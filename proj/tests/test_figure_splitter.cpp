// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include <gtest/gtest.h>

#include <algorithm>

#include "figalign/error.hpp"
#include "figalign/figure_splitter.hpp"
#include "test_support.hpp"

using namespace figalign;
using figalign::testing::TempDir;

namespace {

std::vector<BoundingBox> boxes(const std::vector<SubfigureRegion>& regions) {
  std::vector<BoundingBox> out;
  for (const auto& r : regions) out.push_back(r.box);
  return out;
}

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoFailure;
}

}  // namespace

TEST(SplitCompound, UniformDarkImageIsOneRegion) {
  const auto regions = split_compound(GrayImage(100, 100, 0));
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].box, (BoundingBox{0, 0, 100, 100}));
  EXPECT_EQ(regions[0].score, 1.0);
  EXPECT_EQ(regions[0].order_index, 0);
}

TEST(SplitCompound, AllWhiteImageIsOneFullRegion) {
  const auto regions = split_compound(GrayImage(64, 48, 255));
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].box, (BoundingBox{0, 0, 64, 48}));
}

TEST(SplitCompound, SingleVerticalGutter) {
  GrayImage img(100, 100, 255);
  img.fill_rect(0, 0, 40, 100, 10);
  img.fill_rect(60, 0, 40, 100, 10);
  const auto regions = split_compound(img, {}, "fig");
  EXPECT_EQ(boxes(regions), (std::vector<BoundingBox>{{0, 0, 40, 100}, {60, 0, 40, 100}}));
  EXPECT_EQ(regions[0].order_index, 0);
  EXPECT_EQ(regions[1].order_index, 1);
  EXPECT_EQ(regions[1].figure_id, "fig");
}

TEST(SplitCompound, TwoByTwoGridMatchesConstruction) {
  GrayImage img(100, 100, 255);
  const std::vector<BoundingBox> truth{{0, 0, 45, 45}, {55, 0, 45, 45}, {0, 55, 45, 45},
                                       {55, 55, 45, 45}};
  for (const auto& b : truth) img.fill_rect(b.x, b.y, b.w, b.h, 30);
  const auto regions = split_compound(img);
  ASSERT_EQ(regions.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_GE(figalign::testing::iou_pixel_oracle(regions[i].box, truth[i]), 0.9);
}

TEST(SplitCompound, NarrowGutterIsIgnored) {
  GrayImage img(100, 60, 255);
  img.fill_rect(0, 0, 47, 60, 0);
  img.fill_rect(52, 0, 48, 60, 0);  // 5 px gap < min_gutter_px
  EXPECT_EQ(split_compound(img).size(), 1u);
}

TEST(SplitCompound, SmallLabelStripStaysWithItsPanel) {
  GrayImage img(120, 120, 255);
  img.fill_rect(0, 0, 120, 10, 0);     // caption-like strip, 10 px tall
  img.fill_rect(0, 20, 120, 100, 0);  // panel
  const auto regions = split_compound(img);
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].box, (BoundingBox{0, 0, 120, 120}));
}

TEST(SplitCompound, LongestGutterWinsAndVerticalBreaksTies) {
  // Equal 10 px gutters both ways: the vertical cut happens first, and the
  // final leaves are identical either way; check the ordering is row-major.
  GrayImage img(110, 110, 255);
  img.fill_rect(0, 0, 50, 50, 0);
  img.fill_rect(60, 0, 50, 50, 0);
  img.fill_rect(0, 60, 50, 50, 0);
  img.fill_rect(60, 60, 50, 50, 0);
  const auto regions = split_compound(img);
  EXPECT_EQ(boxes(regions), (std::vector<BoundingBox>{
                                {0, 0, 50, 50}, {60, 0, 50, 50}, {0, 60, 50, 50}, {60, 60, 50, 50}}));
}

TEST(SplitCompound, DepthLimitStopsRecursion) {
  GrayImage img(300, 40, 255);
  for (int i = 0; i < 5; ++i) img.fill_rect(i * 60, 0, 50, 40, 0);
  SplitterParams p;
  p.max_recursion_depth = 0;
  EXPECT_EQ(split_compound(img, p).size(), 1u);
  p.max_recursion_depth = 6;
  EXPECT_EQ(split_compound(img, p).size(), 5u);
}

TEST(SplitCompound, RejectsBadParams) {
  SplitterParams p;
  p.white_threshold = 300;
  EXPECT_EQ(error_of([&] { split_compound(GrayImage(4, 4), p); }), ErrorCode::InvalidConfig);
}

TEST(SplitCompound, GridPropertyOverRandomLayouts) {
  figalign::testing::Rng rng(99);
  std::uniform_int_distribution<int> dim(1, 4);
  for (int iter = 0; iter < 60; ++iter) {
    figalign::testing::GridSpec layout;
    layout.rows = dim(rng);
    layout.cols = dim(rng);
    layout.max_panel = 90;
    const auto g = figalign::testing::make_grid(rng, layout);
    const auto regions = split_compound(g.image);
    ASSERT_EQ(regions.size(), g.truth.size()) << layout.rows << "x" << layout.cols;
    for (std::size_t i = 0; i < regions.size(); ++i) {
      EXPECT_EQ(regions[i].box, g.truth[i]);
      EXPECT_TRUE(regions[i].box.inside(g.image.width(), g.image.height()));
      for (std::size_t j = i + 1; j < regions.size(); ++j)
        EXPECT_EQ(intersection_over_union(regions[i].box, regions[j].box), 0.0);
    }
    auto sorted = regions;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return std::tie(a.box.y, a.box.x) < std::tie(b.box.y, b.box.x);
    });
    EXPECT_EQ(sorted, regions);
    EXPECT_EQ(split_compound(g.image), regions);
  }
}

TEST(IsCompound, CountsRegions) {
  SubfigureRegion r{"f", {0, 0, 10, 10}, 1.0, 0};
  EXPECT_FALSE(is_compound({r}));
  EXPECT_TRUE(is_compound({r, r, r, r}));
  SubfigureRegion other{"g", {0, 0, 10, 10}, 1.0, 0};
  EXPECT_EQ(error_of([&] { is_compound({r, other}); }), ErrorCode::MixedFigureIds);
}

// --- detections ingestion ----------------------------------------------------------

namespace {

std::string detection_line(const std::string& regions, const std::string& id = "f1") {
  return "{\"figure_id\":\"" + id + "\",\"image_width\":100,\"image_height\":100,\"regions\":[" +
         regions + "]}\n";
}

const ImageDims kDims{{"f1", {100, 100}}};

}  // namespace

TEST(IngestDetections, OneRegionAboveThreshold) {
  TempDir dir;
  figalign::testing::write_text(dir / "d.jsonl",
                                detection_line(R"({"x":10,"y":10,"w":50,"h":50,"score":0.9})"));
  const auto regions = ingest_detections(dir / "d.jsonl", kDims, 0.5);
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0], (SubfigureRegion{"f1", {10, 10, 50, 50}, 0.9, 0}));
}

TEST(IngestDetections, BelowThresholdDropped) {
  TempDir dir;
  figalign::testing::write_text(dir / "d.jsonl",
                                detection_line(R"({"x":10,"y":10,"w":50,"h":50,"score":0.3})"));
  IngestCounters counters;
  EXPECT_TRUE(ingest_detections(dir / "d.jsonl", kDims, 0.5, &counters).empty());
  EXPECT_EQ(counters.below_min_score, 1);
}

TEST(IngestDetections, OutOfBoundsIsAnError) {
  TempDir dir;
  figalign::testing::write_text(dir / "d.jsonl",
                                detection_line(R"({"x":90,"y":90,"w":20,"h":20,"score":0.9})"));
  EXPECT_EQ(error_of([&] { ingest_detections(dir / "d.jsonl", kDims, 0.5); }),
            ErrorCode::OutOfBounds);
}

TEST(IngestDetections, UnknownFigure) {
  TempDir dir;
  figalign::testing::write_text(dir / "d.jsonl", detection_line("", "nope"));
  EXPECT_EQ(error_of([&] { ingest_detections(dir / "d.jsonl", kDims, 0.5); }),
            ErrorCode::UnknownFigure);
}

TEST(IngestDetections, SchemaViolationsCarryLineNumbers) {
  const std::string good = detection_line("");
  const std::vector<std::string> bad = {
      "{not json}\n",
      R"({"figure_id":"f2","image_width":100,"regions":[]})" "\n",
      detection_line(R"({"x":1,"y":1,"w":0,"h":5,"score":0.9})", "f2"),
      detection_line(R"({"x":1,"y":1,"w":5,"h":5,"score":1.5})", "f2"),
      detection_line(R"({"x":1,"y":1,"w":5,"h":5})", "f2"),
      detection_line("", "f1"),  // repeated id
  };
  for (const auto& line : bad) {
    try {
      parse_detections(good + line);
      ADD_FAILURE() << line;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::SchemaViolation) << line;
      EXPECT_EQ(e.line(), 2u) << line;
    }
  }
}

TEST(IngestDetections, OverlapsKeepHigherScore) {
  DetectionEntry e{"f1", 100, 100,
                   {{{0, 0, 50, 50}, 0.6}, {{5, 5, 50, 50}, 0.9}, {{60, 0, 40, 40}, 0.7}}, 1};
  IngestCounters c;
  const auto regions = regions_from_entry(e, {100, 100}, 0.5, &c);
  EXPECT_EQ(c.overlap_rejected, 1);
  ASSERT_EQ(regions.size(), 2u);
  EXPECT_EQ(regions[0].box, (BoundingBox{60, 0, 40, 40}));  // y=0 before y=5
  EXPECT_EQ(regions[1].box, (BoundingBox{5, 5, 50, 50}));
  EXPECT_EQ(regions[1].order_index, 1);
}

TEST(IngestDetections, ReadingOrderIsRowMajor) {
  DetectionEntry e{"f1", 100, 100,
                   {{{50, 50, 10, 10}, 0.9}, {{0, 50, 10, 10}, 0.9}, {{50, 0, 10, 10}, 0.9},
                    {{0, 0, 10, 10}, 0.9}},
                   1};
  const auto regions = regions_from_entry(e, {100, 100}, 0.5);
  EXPECT_EQ(boxes(regions), (std::vector<BoundingBox>{
                                {0, 0, 10, 10}, {50, 0, 10, 10}, {0, 50, 10, 10}, {50, 50, 10, 10}}));
}

TEST(IngestDetections, SplitterOutputRoundTripsThroughTheFile) {
  TempDir dir;
  GrayImage img(100, 100, 255);
  img.fill_rect(0, 0, 40, 100, 10);
  img.fill_rect(60, 0, 40, 100, 10);
  const auto regions = split_compound(img, {}, "f1");
  write_detections({to_detection_entry("f1", 100, 100, regions)}, dir / "d.jsonl");
  EXPECT_EQ(ingest_detections(dir / "d.jsonl", kDims, 0.5), regions);
}

TEST(ImageIo, PgmRoundTripAndPpmLuma) {
  TempDir dir;
  GrayImage img(3, 2, 0);
  img.at(1, 0) = 128;
  img.at(2, 1) = 255;
  save_pgm(img, dir / "a.pgm");
  const auto back = load_image(dir / "a.pgm");
  EXPECT_TRUE(std::equal(back.pixels().begin(), back.pixels().end(), img.pixels().begin()));
  EXPECT_EQ(read_image_size(dir / "a.pgm"), (std::pair{3, 2}));

  figalign::testing::write_text(dir / "c.ppm", "P3\n# comment\n2 1\n255\n255 0 0  0 0 255\n");
  const auto c = load_image(dir / "c.ppm");
  EXPECT_EQ(c.at(0, 0), 76);  // 0.299 * 255
  EXPECT_EQ(c.at(1, 0), 29);  // 0.114 * 255
}

#ifdef FIGALIGN_HAVE_PNG
TEST(ImageIo, RgbPngConvertsToLuma) {
  const auto img = load_image(FIGALIGN_FIXTURES "/two_panels.png");
  EXPECT_EQ(read_image_size(FIGALIGN_FIXTURES "/two_panels.png"), (std::pair{100, 100}));
  EXPECT_EQ(img.at(10, 10), 0);
  EXPECT_EQ(img.at(50, 10), 255);
  EXPECT_EQ(img.at(80, 10), 76);  // pure red
  EXPECT_EQ(boxes(split_compound(img)),
            (std::vector<BoundingBox>{{0, 0, 40, 100}, {60, 0, 40, 100}}));
}
#endif

TEST(ImageIo, Failures) {
  TempDir dir;
  figalign::testing::write_text(dir / "bad.pgm", "P5\n4 4\n255\n");  // truncated
  EXPECT_EQ(error_of([&] { load_image(dir / "bad.pgm"); }), ErrorCode::ImageReadFailure);
  EXPECT_EQ(error_of([&] { load_image(dir / "none.pgm"); }), ErrorCode::ImageReadFailure);
  EXPECT_EQ(error_of([&] { load_image(dir / "x.tiff"); }), ErrorCode::ImageReadFailure);
}
