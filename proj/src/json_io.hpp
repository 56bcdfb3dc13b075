// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors
//
// Internal helpers shared by the JSONL readers and writers.

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace figalign::detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Reads a whole file; throws Error(MissingFile) if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes `contents` atomically enough for our purposes (truncate + write);
/// throws Error(IoFailure).
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Calls `fn(line_number, line)` for every non-blank line (1-based numbers,
/// trailing '\r' stripped).
void for_each_line(std::string_view text,
                   const std::function<void(std::size_t, std::string_view)>& fn);

/// Parses one JSON object or throws a std::runtime_error with a short reason.
Json parse_object(std::string_view line);

/// Field accessors. Each throws std::runtime_error naming the field on a
/// type mismatch; the caller turns that into a line-tagged Error.
std::string require_string(const Json& obj, const char* key);
std::optional<std::string> optional_string(const Json& obj, const char* key);
long long require_int(const Json& obj, const char* key);
std::optional<long long> optional_int(const Json& obj, const char* key);
double require_number(const Json& obj, const char* key);
const Json& require_array(const Json& obj, const char* key);

/// Rejects keys outside `allowed`.
void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed);

/// Compact single-line dump; non-ASCII stays raw UTF-8.
std::string dump_line(const OrderedJson& obj);

}  // namespace figalign::detail
