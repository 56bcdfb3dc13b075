// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include "figalign/retrieval.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "figalign/error.hpp"
#include "json_io.hpp"

namespace figalign {

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

EmbeddingSet make_embedding_set(std::vector<std::string> ids,
                                const std::vector<std::vector<double>>& rows) {
  if (ids.size() != rows.size()) throw std::invalid_argument("ids and rows differ in length");
  EmbeddingSet set;
  set.dim = rows.empty() ? 0 : rows.front().size();
  if (!rows.empty() && set.dim == 0)
    throw Error(ErrorCode::DimensionMismatch, "vectors must have at least one component", ids[0], 1);
  std::unordered_map<std::string_view, std::size_t> seen;
  set.vectors = Matrix(rows.size(), set.dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != set.dim)
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(set.dim) + " components, got " +
                      std::to_string(rows[i].size()),
                  ids[i], i + 1);
    double norm2 = 0.0;
    for (double v : rows[i]) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw Error(ErrorCode::ZeroVector, "vector cannot be normalized", ids[i], i + 1);
    for (std::size_t d = 0; d < set.dim; ++d) set.vectors(i, d) = rows[i][d] / norm;
  }
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (!seen.emplace(ids[i], i).second)
      throw Error(ErrorCode::DuplicateId, "embedding id repeated", ids[i], i + 1);
  set.ids = std::move(ids);
  return set;
}

EmbeddingSet parse_embeddings(std::string_view text, std::string_view source) {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> lines;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    try {
      auto obj = detail::parse_object(line);
      detail::check_keys(obj, {"id", "vector"});
      std::string id = detail::require_string(obj, "id");
      std::vector<double> row;
      for (const auto& v : detail::require_array(obj, "vector")) {
        if (!v.is_number()) throw std::runtime_error("vector components must be numbers");
        row.push_back(v.get<double>());
      }
      ids.push_back(std::move(id));
      rows.push_back(std::move(row));
      lines.push_back(line_no);
    } catch (const std::runtime_error& e) {
      throw Error(ErrorCode::MalformedLine, e.what(), std::string(source), line_no);
    }
  });
  try {
    return make_embedding_set(std::move(ids), rows);
  } catch (const Error& e) {
    // Re-tag with the real file line rather than the row index.
    const std::size_t row = e.line() == 0 ? 0 : e.line() - 1;
    throw Error(e.code(), e.what(), e.subject(), row < lines.size() ? lines[row] : 0);
  }
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(detail::read_file(path), path.string());
}

Matrix similarity_matrix(const EmbeddingSet& images, const EmbeddingSet& texts) {
  if (images.dim != texts.dim)
    throw Error(ErrorCode::DimMismatch, "image dim " + std::to_string(images.dim) +
                                            " vs text dim " + std::to_string(texts.dim));
  if (images.size() != texts.size())
    throw Error(ErrorCode::IdSetMismatch, "image and text sets differ in size");
  std::unordered_map<std::string_view, std::size_t> text_row;
  for (std::size_t j = 0; j < texts.size(); ++j) text_row.emplace(texts.ids[j], j);

  std::vector<std::size_t> order(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    auto it = text_row.find(images.ids[i]);
    if (it == text_row.end())
      throw Error(ErrorCode::IdSetMismatch, "no text embedding for image id", images.ids[i]);
    order[i] = it->second;
  }

  const std::size_t n = images.size();
  Matrix sim(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto a = images.vectors.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      auto b = texts.vectors.row(order[j]);
      double dot = 0.0;
      for (std::size_t d = 0; d < images.dim; ++d) dot += a[d] * b[d];
      sim(i, j) = dot;
    }
  }
  return sim;
}

std::string_view to_string(Direction d) noexcept {
  return d == Direction::ImageToText ? "i2t" : "t2i";
}

namespace {

/// Rank of candidate `truth` among `scores`: strictly better candidates plus
/// equal ones with a lower index.
std::size_t rank_of(std::span<const double> scores, std::size_t truth) {
  const double target = scores[truth];
  std::size_t rank = 0;
  for (std::size_t j = 0; j < scores.size(); ++j)
    if (scores[j] > target || (scores[j] == target && j < truth)) ++rank;
  return rank;
}

}  // namespace

double recall_at_k(const Matrix& sim, std::size_t k, Direction direction) {
  if (sim.rows() != sim.cols())
    throw Error(ErrorCode::NotSquare, std::to_string(sim.rows()) + "x" + std::to_string(sim.cols()));
  const std::size_t n = sim.rows();
  if (k < 1 || k > n)
    throw Error(ErrorCode::KOutOfRange, "k=" + std::to_string(k) + " with n=" + std::to_string(n));
  const Matrix& m = direction == Direction::ImageToText ? sim : sim.transposed();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (rank_of(m.row(i), i) < k) ++hits;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(n);
}

double RetrievalReport::recall(Direction direction, std::size_t k) const {
  for (const auto& c : cells)
    if (c.direction == direction && c.k == k) return c.recall;
  throw std::out_of_range("recall cell not computed");
}

namespace {

std::string cell_name(const RecallCell& c) {
  return std::string(to_string(c.direction)) + "@" + std::to_string(c.k);
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string RetrievalReport::to_json() const {
  detail::OrderedJson o;
  o["n_queries"] = n_queries;
  for (const auto& c : cells) o[cell_name(c)] = c.recall;
  return detail::dump_line(o);
}

std::string RetrievalReport::to_table() const {
  std::vector<std::string> head{"n_queries"}, body{std::to_string(n_queries)};
  for (const auto& c : cells) {
    head.push_back(cell_name(c));
    body.push_back(fixed2(c.recall));
  }
  std::ostringstream out;
  for (int line = 0; line < 2; ++line) {
    const auto& cols = line == 0 ? head : body;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const std::size_t width = std::max(head[i].size(), body[i].size());
      if (i) out << "  ";
      out << std::setw(static_cast<int>(width)) << cols[i];
    }
    out << '\n';
  }
  return out.str();
}

RetrievalReport eval_report(const Matrix& sim, const std::vector<std::size_t>& ks) {
  RetrievalReport report;
  report.n_queries = sim.rows();
  for (Direction d : {Direction::ImageToText, Direction::TextToImage})
    for (std::size_t k : ks) report.cells.push_back({d, k, recall_at_k(sim, k, d)});
  return report;
}

RetrievalReport eval_report(const EmbeddingSet& images, const EmbeddingSet& texts,
                            const std::vector<std::size_t>& ks) {
  return eval_report(similarity_matrix(images, texts), ks);
}

}  // namespace figalign
