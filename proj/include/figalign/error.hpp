// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace figalign {

enum class ErrorCode {
  // manifest
  MissingFile,
  MalformedLine,
  DuplicateId,
  DanglingReference,
  IoFailure,
  // caption parser
  UnparsableBody,
  // figure splitter
  SchemaViolation,
  UnknownFigure,
  OutOfBounds,
  ImageReadFailure,
  // label matcher
  MixedFigureIds,
  EmptyRegions,
  // pipeline
  InvalidConfig,
  // retrieval
  DimensionMismatch,
  ZeroVector,
  DimMismatch,
  IdSetMismatch,
  NotSquare,
  KOutOfRange,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Usage/config problems map to CLI exit code 1, everything else to 2.
bool is_config_error(ErrorCode code) noexcept;

/// The single exception type thrown by the library. `subject()` carries the
/// offending identifier (figure id, pair id, path) when there is one and
/// `line()` the 1-based input line, or 0.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {},
        std::size_t line = 0);

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::string subject_;
  std::size_t line_;
};

}  // namespace figalign
