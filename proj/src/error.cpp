// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include "figalign/error.hpp"

namespace figalign {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::UnparsableBody: return "UnparsableBody";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::UnknownFigure: return "UnknownFigure";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::ImageReadFailure: return "ImageReadFailure";
    case ErrorCode::MixedFigureIds: return "MixedFigureIds";
    case ErrorCode::EmptyRegions: return "EmptyRegions";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::IdSetMismatch: return "IdSetMismatch";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
  }
  return "Unknown";
}

bool is_config_error(ErrorCode code) noexcept {
  return code == ErrorCode::MissingFile || code == ErrorCode::InvalidConfig ||
         code == ErrorCode::KOutOfRange;
}

namespace {

std::string compose(ErrorCode code, const std::string& message,
                    const std::string& subject, std::size_t line) {
  std::string out(to_string(code));
  if (line != 0) out += " at line " + std::to_string(line);
  if (!subject.empty()) out += " [" + subject + "]";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string message, std::string subject,
             std::size_t line)
    : std::runtime_error(compose(code, message, subject, line)),
      code_(code),
      subject_(std::move(subject)),
      line_(line) {}

}  // namespace figalign
