// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "figalign/caption_parser.hpp"
#include "figalign/corpus.hpp"
#include "figalign/error.hpp"
#include "figalign/figure_splitter.hpp"
#include "figalign/image.hpp"
#include "figalign/label_matcher.hpp"
#include "figalign/pipeline.hpp"
#include "figalign/retrieval.hpp"

namespace py = pybind11;
using namespace figalign;

namespace {

Direction parse_direction(const std::string& d) {
  if (d == "i2t") return Direction::ImageToText;
  if (d == "t2i") return Direction::TextToImage;
  throw py::value_error("direction must be 'i2t' or 't2i'");
}

GrayImage to_image(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw py::value_error("image must be a 2-D uint8 array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  if (w < 1 || h < 1) throw py::value_error("image must not be empty");
  return GrayImage(w, h, std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

py::array_t<std::uint8_t> to_array(const GrayImage& img) {
  py::array_t<std::uint8_t> out({img.height(), img.width()});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw py::value_error("similarity must be a 2-D array");
  Matrix m(a.shape(0), a.shape(1));
  for (py::ssize_t r = 0; r < a.shape(0); ++r)
    for (py::ssize_t c = 0; c < a.shape(1); ++c) m(r, c) = a.at(r, c);
  return m;
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) v(r, c) = m(r, c);
  return out;
}

py::dict stats_dict(const PipelineStats& s) {
  py::dict hist;
  for (const auto& [status, n] : s.status_histogram) hist[py::str(std::string(to_string(status)))] = n;
  py::dict d;
  d["records_in"] = s.records_in;
  d["records_after_filter"] = s.records_after_filter;
  d["compound_count"] = s.compound_count;
  d["singleton_count"] = s.singleton_count;
  d["pairs_out"] = s.pairs_out;
  d["compound_fraction"] = s.compound_fraction;
  d["expansion_ratio"] = s.expansion_ratio;
  d["status_histogram"] = hist;
  d["flagged_captions"] = s.flagged_captions;
  d["skipped_records"] = s.skipped_records;
  d["inline_marker_rejections"] = s.inline_marker_rejections;
  d["repeated_label_matches"] = s.repeated_label_matches;
  return d;
}

}  // namespace

PYBIND11_MODULE(_figalign, m) {
  m.doc() = "Compound-figure caption alignment";

  static py::handle error_type =
      py::exception<Error>(m, "FigalignError", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type)(e.what());
      err.attr("code") = std::string(to_string(e.code()));
      err.attr("subject") = e.subject();
      err.attr("line") = e.line();
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  py::class_<BoundingBox>(m, "BoundingBox")
      .def(py::init<int, int, int, int>(), py::arg("x"), py::arg("y"), py::arg("w"), py::arg("h"))
      .def_readwrite("x", &BoundingBox::x)
      .def_readwrite("y", &BoundingBox::y)
      .def_readwrite("w", &BoundingBox::w)
      .def_readwrite("h", &BoundingBox::h)
      .def("area", &BoundingBox::area)
      .def("__eq__", [](const BoundingBox& a, const BoundingBox& b) { return a == b; })
      .def("__iter__", [](const BoundingBox& b) {
        return py::iter(py::make_tuple(b.x, b.y, b.w, b.h));
      })
      .def("__repr__", [](const BoundingBox& b) {
        return "BoundingBox(" + std::to_string(b.x) + ", " + std::to_string(b.y) + ", " +
               std::to_string(b.w) + ", " + std::to_string(b.h) + ")";
      });
  m.def("intersection_over_union", &intersection_over_union);

  // captions
  py::class_<SubcaptionSegment>(m, "SubcaptionSegment")
      .def_readonly("label", &SubcaptionSegment::label)
      .def_readonly("text", &SubcaptionSegment::text)
      .def_readonly("start", &SubcaptionSegment::start)
      .def_readonly("end", &SubcaptionSegment::end)
      .def("__repr__", [](const SubcaptionSegment& s) {
        return "SubcaptionSegment(" + (s.label ? std::string(1, *s.label) : "None") + ", " +
               py::repr(py::str(s.text)).cast<std::string>() + ")";
      });
  py::class_<CaptionParse>(m, "CaptionParse")
      .def_readonly("segments", &CaptionParse::segments)
      .def_readonly("shared_context", &CaptionParse::shared_context)
      .def_readonly("duplicate_label", &CaptionParse::duplicate_label)
      .def_readonly("empty_segment", &CaptionParse::empty_segment)
      .def_readonly("inline_rejections", &CaptionParse::inline_rejections)
      .def_property_readonly("flagged", &CaptionParse::flagged)
      .def_property_readonly("labels", [](const CaptionParse& p) { return p.labels().str(); });
  m.def("parse_caption", &parse_caption, py::arg("caption"));
  m.def("segment_caption", &segment_caption, py::arg("caption"));
  m.def("expand_range", [](std::string_view body) { return expand_range(body).str(); },
        py::arg("body"), "Letters denoted by a marker body, e.g. 'a-c' -> 'abc'.");

  // images and splitting
  py::class_<SubfigureRegion>(m, "SubfigureRegion")
      .def_readonly("figure_id", &SubfigureRegion::figure_id)
      .def_readonly("box", &SubfigureRegion::box)
      .def_readonly("score", &SubfigureRegion::score)
      .def_readonly("order_index", &SubfigureRegion::order_index);
  m.def("load_image", [](const std::filesystem::path& p) { return to_array(load_image(p)); },
        py::arg("path"));
  m.def(
      "split_compound",
      [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& image,
         int white_threshold, int min_gutter_px, int min_panel_px, int max_recursion_depth,
         const std::string& figure_id) {
        SplitterParams p{white_threshold, min_gutter_px, min_panel_px, max_recursion_depth};
        const GrayImage img = to_image(image);
        py::gil_scoped_release release;
        return split_compound(img, p, figure_id);
      },
      py::arg("image"), py::arg("white_threshold") = 245, py::arg("min_gutter_px") = 6,
      py::arg("min_panel_px") = 32, py::arg("max_recursion_depth") = 6,
      py::arg("figure_id") = "");

  m.def(
      "normalize_token",
      [](const std::string& text, double confidence, double min_confidence) {
        return normalize_token(OcrToken{"", text, {}, confidence}, min_confidence);
      },
      py::arg("text"), py::arg("confidence") = 1.0,
      py::arg("min_confidence") = kDefaultMinConfidence);

  // corpus
  py::class_<FigureRecord>(m, "FigureRecord")
      .def(py::init<>())
      .def_readwrite("figure_id", &FigureRecord::figure_id)
      .def_readwrite("image_path", &FigureRecord::image_path)
      .def_readwrite("caption", &FigureRecord::caption)
      .def_readwrite("journal", &FigureRecord::journal)
      .def_readwrite("year", &FigureRecord::year)
      .def_readwrite("article_type", &FigureRecord::article_type)
      .def_readwrite("shared_context", &FigureRecord::shared_context);
  py::class_<AlignedPair>(m, "AlignedPair")
      .def_readonly("pair_id", &AlignedPair::pair_id)
      .def_readonly("figure_id", &AlignedPair::figure_id)
      .def_readonly("region", &AlignedPair::region)
      .def_readonly("label", &AlignedPair::label)
      .def_readonly("text", &AlignedPair::text)
      .def_property_readonly("status",
                             [](const AlignedPair& p) { return std::string(to_string(p.status)); });
  py::class_<CorpusManifest>(m, "CorpusManifest")
      .def(py::init<>())
      .def_readwrite("records", &CorpusManifest::records)
      .def_readwrite("pairs", &CorpusManifest::pairs);
  m.def("load_manifest", &load_manifest, py::arg("path"));
  m.def("save_manifest", &save_manifest, py::arg("manifest"), py::arg("path"));

  // pipeline
  m.def(
      "run_pipeline",
      [](const std::filesystem::path& config_path) {
        const PipelineConfig config = load_pipeline_config(config_path);
        AlignmentResult result;
        {
          py::gil_scoped_release release;
          result = run_pipeline(config);
        }
        return stats_dict(result.stats);
      },
      py::arg("config_path"), "Runs the pipeline from a JSON config; returns the stats.");
  m.def(
      "compute_stats",
      [](const CorpusManifest& manifest, std::optional<int> records_in) {
        return stats_dict(
            compute_stats(manifest, records_in.value_or(static_cast<int>(manifest.records.size()))));
      },
      py::arg("manifest"), py::arg("records_in") = py::none());

  // retrieval
  m.def(
      "recall_at_k",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& sim, std::size_t k,
         const std::string& direction) {
        return recall_at_k(to_matrix(sim), k, parse_direction(direction));
      },
      py::arg("similarity"), py::arg("k"), py::arg("direction") = "i2t");
  m.def(
      "similarity_matrix",
      [](const std::filesystem::path& image_emb, const std::filesystem::path& text_emb) {
        return to_array(similarity_matrix(load_embeddings(image_emb), load_embeddings(text_emb)));
      },
      py::arg("image_embeddings"), py::arg("text_embeddings"));
  m.def(
      "eval_retrieval",
      [](const std::filesystem::path& image_emb, const std::filesystem::path& text_emb,
         const std::vector<std::size_t>& ks) {
        const auto report = eval_report(load_embeddings(image_emb), load_embeddings(text_emb), ks);
        py::dict d;
        d["n_queries"] = report.n_queries;
        for (const auto& c : report.cells)
          d[py::str(std::string(to_string(c.direction)) + "@" + std::to_string(c.k))] = c.recall;
        return d;
      },
      py::arg("image_embeddings"), py::arg("text_embeddings"),
      py::arg("ks") = std::vector<std::size_t>{1, 10});
}
