// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace figalign {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Id-keyed embeddings with L2-normalized rows.
struct EmbeddingSet {
  std::vector<std::string> ids;
  std::size_t dim = 0;
  Matrix vectors;

  std::size_t size() const { return ids.size(); }
};

/// Builds a set from raw rows, normalizing each. Throws Error(DuplicateId),
/// Error(ZeroVector) or Error(DimensionMismatch).
EmbeddingSet make_embedding_set(std::vector<std::string> ids,
                                const std::vector<std::vector<double>>& rows);

/// Reads `{"id":str,"vector":[...]}` lines. Throws Error(MalformedLine),
/// Error(DimensionMismatch), Error(ZeroVector), Error(DuplicateId).
EmbeddingSet load_embeddings(const std::filesystem::path& path);
EmbeddingSet parse_embeddings(std::string_view text, std::string_view source = "<memory>");

/// Cosine similarities. Text rows are matched to image rows by id, so entry
/// (i, i) is always the ground-truth pair. Throws Error(DimMismatch) or
/// Error(IdSetMismatch).
Matrix similarity_matrix(const EmbeddingSet& images, const EmbeddingSet& texts);

enum class Direction { ImageToText, TextToImage };

std::string_view to_string(Direction d) noexcept;

/// Percentage of queries whose ground truth ranks in the top k. Candidates
/// are ranked by descending similarity, ties to the lower index. i2t
/// queries rows, t2i queries columns. Throws Error(NotSquare) or
/// Error(KOutOfRange).
double recall_at_k(const Matrix& sim, std::size_t k, Direction direction);

struct RecallCell {
  Direction direction;
  std::size_t k;
  double recall;
};

struct RetrievalReport {
  std::size_t n_queries = 0;
  std::vector<RecallCell> cells;  ///< i2t cells for every k, then t2i

  /// Recall for (direction, k); throws std::out_of_range if not computed.
  double recall(Direction direction, std::size_t k) const;

  /// `{"n_queries":N,"i2t@1":..,"i2t@10":..,"t2i@1":..,"t2i@10":..}`
  std::string to_json() const;
  /// Aligned plain-text table with one column per cell.
  std::string to_table() const;
};

RetrievalReport eval_report(const EmbeddingSet& images, const EmbeddingSet& texts,
                            const std::vector<std::size_t>& ks = {1, 10});

RetrievalReport eval_report(const Matrix& sim, const std::vector<std::size_t>& ks = {1, 10});

}  // namespace figalign
